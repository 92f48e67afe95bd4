#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <json.hpp>

#include "ctomo/estimators.hpp"
#include "ctomo/forward.hpp"
#include "ctomo/polynomial.hpp"
#include "ctomo/sdp.hpp"

namespace ctomo {

class InfeasibleStartError : public Error {
 public:
  using Error::Error;
};

enum class SosTask { kQstD, kQstI, kQdtD, kQdtI, kQptD, kQptI, kPureState, kUnitary };

std::string to_string(SosTask t);
SosTask sos_task_from_string(const std::string& s);

// Program variables that together describe one quantum object.
struct VariableBlock {
  enum class Kind {
    kState,       // Gell-Mann coordinates 2..d^2, the first one fixed at 1/sqrt(d)
    kPovm,        // outcomes x d^2 Gell-Mann coordinates
    kProcess,     // d^4 Gell-Mann coordinates of the d^2 x d^2 process matrix
    kPureVector,  // real parts then imaginary parts of a d-vector
    kUnitary,     // real parts then imaginary parts of a row-major d x d matrix
    kFamily,      // coefficients of an affine process family
  };
  Kind kind = Kind::kState;
  int offset = 0;
  int size = 0;
  int dim = 0;
  int outcomes = 0;
  bool trace_preserving = true;
  // kFamily: X = base + sum_k p_k directions[k] with lower <= p <= upper.
  CMatrix base;
  std::vector<CMatrix> directions;
  RVector lower, upper;
};

// One vector of matrices per block: {rho}, {P_1..P_L}, {X}, {psi psi^dagger}, {G}, {X}.
using BlockValues = std::vector<std::vector<CMatrix>>;

struct SemialgebraicProgram {
  int num_vars = 0;
  Polynomial objective;
  std::vector<Polynomial> equalities;    // = 0
  std::vector<std::string> equality_labels;
  std::vector<Polynomial> inequalities;  // >= 0
  std::vector<std::string> inequality_labels;
  std::vector<std::string> var_names;
  std::vector<VariableBlock> blocks;

  void validate() const;
  int degree() const;
  double cost(const RVector& x) const;
  // Largest equality magnitude or inequality shortfall.
  double violation(const RVector& x) const;
  std::size_t count_inequalities(const std::string& label_prefix) const;
};

BlockValues decode(const SemialgebraicProgram& p, const RVector& x);
RVector encode(const SemialgebraicProgram& p, const BlockValues& values);
// Maximally mixed states, uniform POVMs, I/d processes, family midpoints.
RVector default_point(const SemialgebraicProgram& p);

struct ProcessFamily {
  CMatrix base;
  std::vector<CMatrix> directions;
  RVector lower, upper;
};

// X_Y + p (X_I - X_Y) for p in [0, 1], i.e. the bit-phase flip channel.
ProcessFamily bit_phase_flip_family();

struct ProgramOptions {
  // Qubit POVM elements get sum_i phi_i^2 <= 1.
  bool ball_constraints = true;
  // QPT: one family per unknown process (one for identical copies) restricts X.
  std::vector<ProcessFamily> families;
  bool first_tp = true;
  bool second_tp = true;
  CopyMode pure_mode = CopyMode::kDistinct;
  CopyMode unitary_mode = CopyMode::kIdentical;
};

SemialgebraicProgram build_sos_program(SosTask task, const LinearModel& model, const ProgramOptions& opts = {});

struct RelaxationOptions {
  long max_moments = 3000;
};

// F(y)_{row,col} += coefficient * y[moment] in SDP block `block` (row <= col).
struct MomentEntry {
  int block;
  int row;
  int col;
  int moment;
  double coefficient;
};

struct Relaxation {
  SdpProblem sdp;
  int order = 0;
  // Affine equalities are eliminated: x = shift + map * z.
  RVector shift;
  RMatrix map;
  std::vector<Exponents> moments;  // graded monomials in z up to degree 2 order
  std::map<Exponents, int> moment_index;
  // Moment vector y = particular + null_space * w, w the SDP dual variables.
  RVector particular;
  Eigen::SparseMatrix<double> null_space;
  std::vector<MomentEntry> entries;
  RVector objective_coefficients;  // reduced objective / objective_scale, per moment
  double objective_scale = 1.0;
  double objective_norm = 0.0;     // coefficient norm of the reduced objective
  // Per SDP block: the multiplier polynomial (1 for the moment block) and its basis.
  std::vector<Polynomial> block_weights;
  std::vector<std::vector<Exponents>> block_bases;
  Polynomial reduced_objective;
  std::vector<Polynomial> nonlinear_equalities;  // in z

  int reduced_vars() const { return static_cast<int>(map.cols()); }
};

int minimal_order(const SemialgebraicProgram& p);
// order 0 selects minimal_order(p).
Relaxation lasserre_relaxation(const SemialgebraicProgram& p, int order = 0, const RelaxationOptions& opts = {});

struct Extraction {
  std::optional<RVector> point;
  double ratio = 0.0;  // leading over second moment-matrix eigenvalue
};

Extraction extract_candidate(const Relaxation& r, const SdpSolution& s, double threshold = 1e4);
double relaxation_bound(const Relaxation& r, const SdpSolution& s);
// ||objective - gamma - certificate|| / ||objective|| over coefficients.
double certificate_residual(const Relaxation& r, const SdpSolution& s, double gamma);

struct PolishOptions {
  double step_tolerance = 1e-10;
  int max_iterations = 1000;
  double recovery_distance = 1.0;
};

struct PolishResult {
  RVector point;
  double cost = 0.0;
  int iterations = 0;
  double violation = 0.0;
};

RVector project_to_program(const SemialgebraicProgram& p, const RVector& x);
PolishResult local_polish(const SemialgebraicProgram& p, const RVector& start, const PolishOptions& opts = {});

struct SosConfig {
  int order = 0;
  ProgramOptions program;
  RelaxationOptions relaxation;
  SdpOptions sdp;
  PolishOptions polish;
  double extraction_threshold = 1e4;
};

struct SosResult {
  double lower_bound = 0.0;
  std::optional<RVector> candidate;
  std::optional<double> candidate_cost;
  std::optional<double> gap;
  std::optional<RVector> extracted_candidate;
  SdpStatus status = SdpStatus::kOptimal;
  int iterations = 0;
  double duality_gap = 0.0;
  double certificate_residual = 0.0;
  double moment_ratio = 0.0;
  int order = 0;
  std::size_t moments = 0;
  BlockValues estimate;  // decoded candidate
};

SosResult solve_sos(const SemialgebraicProgram& p, const SosConfig& cfg, const std::optional<RVector>& start = {});
// Builds the program and polishes from both the extracted candidate and a
// closed-form start.
SosResult solve_sos(SosTask task, const LinearModel& model, const SosConfig& cfg = {});

// Closed-form estimate of the task's unknowns, encoded as program variables.
std::optional<RVector> closed_form_start(SosTask task, const LinearModel& model, const SemialgebraicProgram& p);

nlohmann::json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j, int num_vars);
nlohmann::json to_json(const SemialgebraicProgram& p);
nlohmann::json to_json(const SosResult& r);

}  // namespace ctomo
