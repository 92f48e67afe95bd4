#pragma once

#include <string>
#include <vector>

#include "ctomo/linalg.hpp"

namespace ctomo {

// One coefficient of a symmetric constraint matrix; row <= col, and an
// off-diagonal value stands for both (row, col) and (col, row).
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Primal:  min <C, X>  s.t. <A_k, X> = b_k, X >= 0 (block diagonal).
// Dual:    max b^T y   s.t. Z = C - sum_k y_k A_k >= 0.
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<RMatrix> c;
  std::vector<std::vector<SdpEntry>> a;
  RVector b;

  int constraints() const { return static_cast<int>(a.size()); }
  void validate() const;
};

struct SdpOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.98;
  // Lower bound on the centering parameter; keeps iterates near the central
  // path so that X Z, not only Tr(X Z), goes to zero.
  double min_centering = 0.1;
  // Iterate norms beyond this are read as primal or dual infeasibility.
  double divergence = 1e12;
};

enum class SdpStatus { kOptimal, kMaxIterations, kInfeasible, kNumericalFailure };

std::string to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::vector<RMatrix> x;
  std::vector<RMatrix> z;
  RVector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

// Infeasible primal-dual path following with the HKM search direction and
// Mehrotra predictor-corrector steps. Reentrant.
SdpSolution sdp_solve(const SdpProblem& p, const SdpOptions& opts = {});

// <A_k, X> for every constraint.
RVector sdp_apply(const SdpProblem& p, const std::vector<RMatrix>& x);

}  // namespace ctomo
