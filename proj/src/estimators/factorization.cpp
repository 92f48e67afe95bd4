#include <cmath>
#include <numeric>
#include <string>

#include "ctomo/estimators.hpp"

namespace ctomo {

namespace {

Complex checked_trace(const CMatrix& m, double tol, const char* what) {
  const Complex t = m.trace();
  if (std::abs(t) < tol) {
    throw DegenerateInputError(std::string(what) + ": trace " + std::to_string(std::abs(t)) +
                               " is too small to fix the scale");
  }
  return t;
}

}  // namespace

KronFactors nearest_kron_factor(const CMatrix& m, int d1, int d2, KronNormalization normalization,
                                double degenerate_trace) {
  const SvdFactor f = best_rank_one(kron_rearrange(m, d1, d2));
  const CMatrix left = unvec(f.left, d1, d1);
  const CMatrix right = unvec(f.sigma * f.right.conjugate(), d2, d2);

  Complex alpha = 1.0;
  switch (normalization.kind) {
    case KronNormalization::Kind::kUnitTraceLeft:
      alpha = 1.0 / checked_trace(left, degenerate_trace, "nearest_kron_factor");
      break;
    case KronNormalization::Kind::kLeftTrace:
      alpha = normalization.value / checked_trace(left, degenerate_trace, "nearest_kron_factor");
      break;
    case KronNormalization::Kind::kRightTrace:
      alpha = checked_trace(right, degenerate_trace, "nearest_kron_factor") / normalization.value;
      break;
    case KronNormalization::Kind::kScale:
      if (std::abs(normalization.value) == 0.0) throw DegenerateInputError("nearest_kron_factor: zero scale");
      alpha = normalization.value;
      break;
  }
  return {alpha * left, right / alpha, f.residual, f.degenerate};
}

std::pair<CMatrix, CMatrix> marginal_factor(const CMatrix& m, int d1, int d2) {
  return {partial_trace(m, d1, d2, Subsystem::kSecond), partial_trace(m, d1, d2, Subsystem::kFirst)};
}

std::vector<CMatrix> n_copy_decouple(const CMatrix& m, const std::vector<int>& dims) {
  if (dims.size() < 2) throw DimensionError("n_copy_decouple: need at least two factors");
  const long side = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<long>());
  if (m.rows() != side || m.cols() != side) throw DimensionError("n_copy_decouple: matrix side mismatch");
  std::vector<CMatrix> factors;
  CMatrix rest = m;
  long rest_side = side;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    rest_side /= dims[k];
    KronFactors f = nearest_kron_factor(rest, dims[k], static_cast<int>(rest_side));
    factors.push_back(std::move(f.left));
    rest = std::move(f.right);
  }
  factors.push_back(std::move(rest));
  return factors;
}

std::pair<CMatrix, CMatrix> finalize_state_factors(const CMatrix& left, const CMatrix& right,
                                                   double degenerate_trace) {
  const Complex t1 = checked_trace(left, degenerate_trace, "finalize_state_factors");
  const CMatrix l = left / t1;
  const CMatrix r = right * t1;  // the pair's product is left (x) right
  const Complex tr = checked_trace(r, degenerate_trace, "finalize_state_factors");
  const CMatrix rbar = 0.5 * (r / tr + r.adjoint() / std::conj(tr));
  return {hermitian_part(l), rbar};
}

}  // namespace ctomo
