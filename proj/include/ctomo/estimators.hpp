#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctomo/forward.hpp"

namespace ctomo {

enum class Inversion { kPlainLs, kMpInverse, kRegularized, kTraceConstrained };

enum class Factorization { kNearestKron, kMarginal };

enum class CopyMode { kDistinct, kIdentical };

struct EstimatorConfig {
  Inversion inversion = Inversion::kTraceConstrained;
  // D in (Phi^dagger Phi + D)^{-1} Phi^dagger y; when absent, D = regularization_scale * I.
  std::optional<RMatrix> regularization;
  double regularization_scale = 0.0;
  Factorization factorization = Factorization::kNearestKron;
  double rank_tolerance = 1e-8;
  double projection_tolerance = 1e-9;
  int projection_max_iterations = 500;
  double fixed_point_tolerance = 1e-10;
  double degenerate_trace = 1e-10;

  // trace_constrained for QST, plain least squares otherwise.
  static EstimatorConfig defaults_for(TaskKind kind);
};

class ProjectionFailure : public Error {
 public:
  ProjectionFailure(const std::string& what, std::vector<CMatrix> last_iterate, double violation)
      : Error(what), last_(std::move(last_iterate)), violation_(violation) {}
  const std::vector<CMatrix>& last_iterate() const { return last_; }
  double violation() const { return violation_; }

 private:
  std::vector<CMatrix> last_;
  double violation_;
};

// The affine map y -> x of a chosen inversion, prepared once per design.
class LinearInverter {
 public:
  // `fixed_first` pins x_0 for trace_constrained inversion.
  LinearInverter(const CMatrix& design, const EstimatorConfig& cfg,
                 std::optional<double> fixed_first = std::nullopt);

  CVector solve(const CVector& y) const;
  long rank() const { return rank_; }
  bool real_design() const { return real_; }

 private:
  CMatrix solve_matrix_;
  CVector offset_;
  std::optional<double> fixed_first_;
  CVector first_column_;
  long rank_ = 0;
  bool real_ = true;
};

CVector linear_inversion(const LinearModel& model, const EstimatorConfig& cfg);

struct KronNormalization {
  enum class Kind { kUnitTraceLeft, kLeftTrace, kRightTrace, kScale };
  Kind kind = Kind::kUnitTraceLeft;
  Complex value = 1.0;

  static KronNormalization unit_trace_left() { return {}; }
  static KronNormalization trace_sum(double d) { return {Kind::kLeftTrace, d}; }
  static KronNormalization right_trace(double d) { return {Kind::kRightTrace, d}; }
  static KronNormalization scale(Complex alpha) { return {Kind::kScale, alpha}; }
};

struct KronFactors {
  CMatrix left;
  CMatrix right;
  double residual = 0.0;
  bool degenerate = false;
};

KronFactors nearest_kron_factor(const CMatrix& m, int d1, int d2,
                                KronNormalization normalization = KronNormalization::unit_trace_left(),
                                double degenerate_trace = 1e-10);

std::pair<CMatrix, CMatrix> marginal_factor(const CMatrix& m, int d1, int d2);

std::vector<CMatrix> n_copy_decouple(const CMatrix& m, const std::vector<int>& dims);

struct ProjectionOptions {
  double tolerance = 1e-9;
  int max_iterations = 500;
  double fixed_point_tolerance = 1e-10;
};

struct PovmProjection {
  Povm povm;
  int iterations = 0;
  double violation = 0.0;
};

struct ProcessProjection {
  ProcessMatrix process;
  int iterations = 0;
  double violation = 0.0;
};

QuantumState project_state(const CMatrix& m);
// Euclidean projection of a real vector onto the probability simplex.
RVector project_simplex(const RVector& v);
PovmProjection project_povm(const std::vector<CMatrix>& elements, const ProjectionOptions& opts = {});
ProcessProjection project_process(const CMatrix& m, bool trace_preserving,
                                  const ProjectionOptions& opts = {});

struct Diagnostics {
  double inversion_residual = 0.0;
  double factor_residual = 0.0;
  bool degenerate_factor = false;
  long design_rank = 0;
  int projection_iterations = 0;
  std::vector<std::string> warnings;
};

struct TomographyResult {
  TaskKind kind = TaskKind::kQst;
  CopyMode mode = CopyMode::kDistinct;
  std::vector<QuantumState> states;
  std::vector<Povm> povms;
  std::vector<ProcessMatrix> processes;
  std::vector<CMatrix> intermediate;
  Diagnostics diagnostics;
};

// Trace-normalized Hermitian pair from raw Kronecker factors; invariant under
// (left, right) -> (a left, right / a).
std::pair<CMatrix, CMatrix> finalize_state_factors(const CMatrix& left, const CMatrix& right,
                                                   double degenerate_trace = 1e-10);

TomographyResult estimate_qst(const LinearModel& model, const EstimatorConfig& cfg, CopyMode mode,
                              const LinearInverter* inverter = nullptr);
TomographyResult estimate_qdt(const LinearModel& model, const EstimatorConfig& cfg, CopyMode mode,
                              const LinearInverter* inverter = nullptr);

struct ProcessFlags {
  bool first_tp = true;
  bool second_tp = true;
  // Estimate of Tr(X1)/d1; falls back to the model's calibration setting.
  std::optional<double> alpha1;
};

TomographyResult estimate_qpt(const LinearModel& model, const EstimatorConfig& cfg, CopyMode mode,
                              const ProcessFlags& flags = {}, const LinearInverter* inverter = nullptr);

struct PureTruncation {
  QuantumState state;
  bool degenerate = false;
};

PureTruncation truncate_pure(const QuantumState& s);
CMatrix extract_unitary(const ProcessMatrix& x);

struct PurityEstimate {
  QuantumState state;
  RVector theta;
  double target_purity = 0.0;
  bool clamped = false;
};

// Two-copy collective POVM frequencies (five outcomes) of a qubit.
PurityEstimate estimate_qubit_with_purity(const RVector& frequencies);

nlohmann::json to_json(const TomographyResult& r);

}  // namespace ctomo
