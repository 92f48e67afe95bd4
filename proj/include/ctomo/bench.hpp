#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctomo/estimators.hpp"
#include "ctomo/sos.hpp"

namespace ctomo {

enum class BenchTask { kDQst, kIQst, kDQdt, kIQdt, kDQpt, kIQpt };
enum class BenchEstimator { kCf, kCfReg, kSos, kPurityCf, kMarginal };

std::string to_string(BenchTask t);
std::string to_string(BenchEstimator e);
BenchTask bench_task_from_string(const std::string& s);
BenchEstimator bench_estimator_from_string(const std::string& s);

TaskKind task_kind(BenchTask t);
CopyMode copy_mode(BenchTask t);
SosTask sos_task(BenchTask t);

// Parameters of the simulated ground truth. Unitaries and probes are drawn
// once per configuration from the experiment seed, probes after the truth
// objects.
struct TruthSpec {
  std::string name = "default";
  std::vector<std::vector<double>> spectra;  // one per unknown state
  std::vector<CMatrix> states;               // explicit states; override spectra
  // Diagonals of all but the last element; the last one completes the identity.
  std::vector<std::vector<double>> detector;
  std::vector<double> flip;  // bit-phase flip probabilities, one per unknown channel
  int probes = 0;
  // Candidate probe sets drawn; the one with the smallest sum of 1/sigma^2
  // over the design's nonzero singular values is kept.
  int probe_draws = 8;
};

// Presets: "default" (per task), "pure" (rank-one QST states), "purity-s1"
// (Bloch vector (1/sqrt2, 0, 1/sqrt2)), "incomplete" (QDT with 4 probes).
TruthSpec truth_preset(const std::string& name, BenchTask task);
TruthSpec truth_from_json(const nlohmann::json& j, BenchTask task);

struct ExperimentConfig {
  BenchTask task = BenchTask::kIQst;
  BenchEstimator estimator = BenchEstimator::kCf;
  std::string measurement = "mub";  // mub, sic, collective2, collective3, custom
  std::string custom_path;          // scheme JSON for measurement "custom"
  std::vector<long> copies_grid;
  int trials = 100;
  std::uint64_t seed = 1;
  TruthSpec truth = truth_preset("default", BenchTask::kIQst);
  int order = 0;              // SOS relaxation order, 0 for the minimal one
  double reg_scale = 1000.0;  // cf-reg uses D = (reg_scale / N) I
  bool noiseless = false;
  int threads = 0;            // 0: hardware concurrency
  bool timing = false;        // wall_time_s stays 0 unless set, keeping outputs reproducible

  void validate() const;
};

struct MseRow {
  BenchTask task = BenchTask::kIQst;
  BenchEstimator estimator = BenchEstimator::kCf;
  std::string measurement;
  long copies = 0;
  long shots = 0;
  int trial = 0;
  double mse = 0.0;
  std::vector<double> object_mse;  // per unknown state, detector or channel
  double residual = 0.0;
  double wall_time = 0.0;
  std::optional<std::string> failure;  // estimator error; mse is NaN then
};

// Estimated objects in truth order: states, POVM elements or process matrices.
struct BenchEstimate {
  std::vector<std::vector<CMatrix>> objects;
  double residual = 0.0;
  nlohmann::json detail;  // estimator-specific report
};

// Truth objects, measurement and the prepared linear model of one configuration.
class Scenario {
 public:
  explicit Scenario(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const MeasurementScheme& scheme() const { return scheme_; }
  const std::vector<QuantumState>& probes() const { return probes_; }
  const std::vector<CMatrix>& truth_states() const { return states_; }
  const std::vector<std::vector<CMatrix>>& truth_povms() const { return povms_; }
  const std::vector<CMatrix>& truth_processes() const { return processes_; }
  int copies_per_shot() const { return copies_per_shot_; }
  std::size_t settings() const { return probabilities_.size(); }

  // Exact per-setting outcome probabilities.
  const std::vector<RVector>& probabilities() const { return probabilities_; }
  // Model with no data attached.
  const LinearModel& model() const { return model_; }
  std::vector<std::string> setting_ids() const;

  // Fills the model with counts drawn for `copies` state copies.
  std::vector<CountsRecord> sample(long copies, Rng& rng) const;

  // Runs the configured estimator on `model` (data attached); throws on failure.
  BenchEstimate estimate(const LinearModel& model, long copies) const;
  // estimate() scored against the truth.
  MseRow evaluate(const LinearModel& model, long copies) const;
  // Bloch length of the single qubit state of i-qst, else empty.
  std::optional<double> bloch_length() const;

  nlohmann::json truth_json() const;

 private:
  EstimatorConfig estimator_config(long copies) const;

  ExperimentConfig cfg_;
  MeasurementScheme scheme_;
  int copies_per_shot_ = 1;
  std::vector<QuantumState> probes_;
  std::vector<CMatrix> states_;
  std::vector<std::vector<CMatrix>> povms_;
  std::vector<CMatrix> processes_;
  std::vector<RVector> probabilities_;
  LinearModel model_;
  std::shared_ptr<const LinearInverter> inverter_;  // for cf and marginal
};

MeasurementScheme scheme_from_json(const nlohmann::json& j);

// splitmix64 finalizer; per-trial seeds depend only on (seed, N, trial).
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t trial_seed(std::uint64_t seed, long copies, int trial);

// Rows sorted by (N, trial); estimator failures stay in their rows.
std::vector<MseRow> run_experiment(const ExperimentConfig& cfg);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
};

// Least squares of log10(mean) on log10(N); needs at least 3 distinct N.
SlopeFit fit_slope(const std::vector<long>& copies, const std::vector<double>& mean_mse);
// Means over successful rows, per N; `object` selects an object_mse entry.
SlopeFit fit_slope(const std::vector<MseRow>& rows, std::optional<std::size_t> object = std::nullopt);

// Lower bound on the MSE of two-copy collective qubit tomography at Bloch length s.
double collective_bound(double s, long copies);

struct CrbOverlay {
  double classical = 0.0;
  double quantum = 0.0;
};

CrbOverlay crb_overlays(long copies);

struct IngestedCounts {
  CountsFile file;
  std::vector<RVector> frequencies;
};

IngestedCounts ingest_counts(const std::string& path);
IngestedCounts ingest_counts(const nlohmann::json& j);

struct GroupSummary {
  long copies = 0;
  long shots = 0;
  int trials = 0;
  int failures = 0;
  double mean = 0.0;
  double std_error = 0.0;  // standard error of the mean
  std::vector<double> object_means;
};

std::vector<GroupSummary> summarize(const std::vector<MseRow>& rows);

// CSV columns: task,estimator,measurement,N,trial,mse,residual,wall_time_s.
std::string rows_to_csv(const std::vector<MseRow>& rows);
nlohmann::json summary_json(const ExperimentConfig& cfg, const std::vector<MseRow>& rows,
                            const std::optional<double>& bloch_length = std::nullopt);
void write_text(const std::string& path, const std::string& text);

}  // namespace ctomo
