#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctomo/quantum.hpp"

namespace ctomo {

enum class TaskKind { kQst, kQdt, kQpt };

// A set of measurement settings applied to the joint system; every setting is
// a POVM and each shot of the experiment consumes `copies_per_shot` copies.
struct MeasurementScheme {
  std::string name;
  std::vector<Povm> settings;
  std::vector<std::string> setting_ids;
  int copies_per_shot = 1;

  int dim() const { return settings.empty() ? 0 : settings.front().dim(); }
  std::size_t outcome_count() const;
};

MeasurementScheme mub_scheme();
MeasurementScheme single_povm_scheme(const std::string& name, Povm povm, int copies_per_shot);
// SIC measured independently on each qubit factor, as one 4^n-outcome product setting.
MeasurementScheme sic_product_scheme(int factors);

enum class QptData {
  kOutputStates,   // per-probe least-squares reconstruction of the output states
  kProbabilities,  // measured frequencies used directly
};

struct LinearModel {
  TaskKind kind = TaskKind::kQst;
  std::vector<int> factor_dims;  // dimensions of the unknown factors
  CMatrix design;
  CVector observation;
  std::vector<long> shots_per_row;
  std::vector<int> setting_sizes;  // outcomes per setting in row order (QST)

  // QDT: observation is the column-stacked M x (L K) matrix whose column
  // l K + k is the data vector of P_l (x) Q_k; `design` holds the M rows.
  int outcomes_left = 0;
  int outcomes_right = 0;
  int blocks() const { return kind == TaskKind::kQdt ? outcomes_left * outcomes_right : 1; }

  // QPT
  QptData qpt_data = QptData::kOutputStates;
  int probes = 0;
  std::vector<int> probe_setting_sizes;  // outcomes of the scheme settings, per probe
  RMatrix state_design;                  // Gell-Mann design on the joint output system
  bool loss_outcome = false;             // each setting has a trailing "lost" outcome
  bool scale_setting = false;            // trailing calibration record for Tr(X1)/d1
  std::optional<double> scale_estimate;

  long total_dim() const;
  void validate() const;
};

struct CountsRecord {
  std::string setting_id;
  std::vector<long> outcome_counts;
  long shots = 0;
};

struct CountsFile {
  nlohmann::json header;
  std::vector<CountsRecord> records;
};

// Product-basis coefficient rows: P_l = sum_ij phi_l^{ij} Omega_i (x) Xi_j.
LinearModel build_phi(const Povm& povm, const HermitianBasis& basis1, const HermitianBasis& basis2);
LinearModel build_phi(const MeasurementScheme& scheme, const std::vector<HermitianBasis>& bases);

LinearModel build_theta(const std::vector<QuantumState>& probes, const HermitianBasis& basis1,
                        const HermitianBasis& basis2, int outcomes_left, int outcomes_right);

// One block per probe with vec(E(rho_m)) = M_m vec(X); column j + k d^2 of M_m
// is (E_k^* (x) E_j) vec(rho_m).
std::vector<CMatrix> build_process_model(const std::vector<QuantumState>& probes);

LinearModel build_collective_process_model(const std::vector<QuantumState>& probes,
                                           const MeasurementScheme& scheme, int d1, int d2,
                                           QptData data = QptData::kOutputStates,
                                           bool loss_outcome = false,
                                           bool scale_setting = false);

// Real part of design * tensor (per observation row).
RVector born_probabilities(const LinearModel& model, const CVector& tensor);

// Direct Born statistics, one vector per setting.
std::vector<RVector> setting_probabilities(const MeasurementScheme& scheme, const CMatrix& joint_state);
std::vector<RVector> setting_probabilities(const std::vector<QuantumState>& probes,
                                           const Povm& left, const Povm& right);
std::vector<RVector> setting_probabilities(const LinearModel& qpt_model,
                                           const std::vector<QuantumState>& probes,
                                           const MeasurementScheme& scheme,
                                           const CMatrix& joint_x, double scale_value = 1.0);

std::vector<std::string> setting_ids(const LinearModel& model, const MeasurementScheme* scheme);

// Equal split of total_shots over settings, remainder to the earliest ones;
// one multinomial draw per setting.
std::vector<CountsRecord> sample_counts(const std::vector<RVector>& probs, long total_shots,
                                        Rng& rng, const std::vector<std::string>& ids = {});

// Fills observation and shots from sampled records or from exact probabilities.
void attach_counts(LinearModel& model, const std::vector<CountsRecord>& records);
void attach_probabilities(LinearModel& model, const std::vector<RVector>& probs);

struct Completeness {
  bool complete = false;
  long rank = 0;
};

Completeness completeness_check(const LinearModel& model, long required_rank);

nlohmann::json to_json(const CountsRecord& r);
CountsRecord counts_record_from_json(const nlohmann::json& j, std::size_t index);
nlohmann::json to_json(const CountsFile& f);
CountsFile counts_file_from_json(const nlohmann::json& j);

}  // namespace ctomo
