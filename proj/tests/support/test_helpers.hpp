#pragma once

#include <random>

#include "ctomo/quantum.hpp"

namespace ctomo::testing {

inline CMatrix random_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline CVector random_vector(Index n, Rng& rng) { return random_matrix(n, 1, rng).col(0); }

inline CMatrix random_hermitian(Index n, Rng& rng) {
  const CMatrix a = random_matrix(n, n, rng);
  return (a + a.adjoint()) / 2.0;
}

inline CMatrix random_density(int d, Rng& rng) {
  const CMatrix a = random_matrix(d, d, rng);
  const CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline std::vector<double> random_spectrum(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(static_cast<std::size_t>(d));
  double total = 0.0;
  for (auto& x : s) total += (x = u(rng));
  for (auto& x : s) x /= total;
  return s;
}

// Random qubit POVM with `outcomes` elements built from a random positive
// family conjugated by the inverse square root of its sum.
inline std::vector<CMatrix> random_povm_elements(int d, int outcomes, Rng& rng) {
  std::vector<CMatrix> raw;
  CMatrix sum = CMatrix::Zero(d, d);
  for (int l = 0; l < outcomes; ++l) {
    const CMatrix a = random_matrix(d, d, rng);
    raw.push_back(a * a.adjoint());
    sum += raw.back();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sum);
  const CMatrix inv_sqrt = es.operatorInverseSqrt();
  for (auto& p : raw) p = (inv_sqrt * p * inv_sqrt + (inv_sqrt * p * inv_sqrt).adjoint()) / 2.0;
  CMatrix residual = CMatrix::Identity(d, d);
  for (std::size_t l = 0; l + 1 < raw.size(); ++l) residual -= raw[l];
  raw.back() = (residual + residual.adjoint()) / 2.0;
  return raw;
}

inline CMatrix random_unitary_channel_x(int d, Rng& rng) {
  const CMatrix g = haar_random_unitary(d, rng);
  return process_from_kraus({g});
}

// Random trace-preserving channel from a Stiefel isometry split into Kraus blocks.
inline std::vector<CMatrix> random_kraus(int d, int count, Rng& rng) {
  const CMatrix v = haar_random_unitary(d * count, rng).leftCols(d);
  std::vector<CMatrix> ks;
  for (int k = 0; k < count; ++k) ks.push_back(v.middleRows(k * d, d));
  return ks;
}

}  // namespace ctomo::testing
