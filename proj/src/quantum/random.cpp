#include <cmath>
#include <string>

#include "ctomo/quantum.hpp"

namespace ctomo {

CMatrix haar_random_unitary(int d, Rng& rng) {
  if (d < 1) throw DimensionError("haar_random_unitary: dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

QuantumState random_state(int d, const std::vector<double>& spectrum, Rng& rng) {
  if (static_cast<int>(spectrum.size()) != d) {
    throw InvalidObjectError("random_state: spectrum length " + std::to_string(spectrum.size()) +
                             " differs from dimension " + std::to_string(d));
  }
  double total = 0.0;
  for (double s : spectrum) {
    if (!(s >= 0.0)) throw InvalidObjectError("random_state: negative spectrum entry");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-10) throw InvalidObjectError("random_state: spectrum does not sum to 1");
  const CMatrix u = haar_random_unitary(d, rng);
  RVector lambda(d);
  for (int k = 0; k < d; ++k) lambda(k) = spectrum[static_cast<std::size_t>(k)];
  return QuantumState(hermitian_part(u * lambda.cast<Complex>().asDiagonal() * u.adjoint()));
}

CVector random_pure_vector(int d, Rng& rng) {
  return haar_random_unitary(d, rng).col(0);
}

}  // namespace ctomo
