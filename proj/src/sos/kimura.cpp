#include <string>

#include "ctomo/polynomial.hpp"

namespace ctomo {

std::vector<Polynomial> elementary_symmetric(const PolyMatrix& a) {
  const int d = a.side();
  const int n = a.num_vars();
  // Power traces Tr(A^f), f = 1..d; the imaginary parts vanish for Hermitian A.
  std::vector<Polynomial> power_trace;
  PolyMatrix power = a;
  power_trace.push_back(power.trace().re.pruned(1e-14));
  for (int f = 2; f <= d; ++f) {
    power = power * a;
    power_trace.push_back(power.trace().re.pruned(1e-14));
  }
  std::vector<Polynomial> e(static_cast<std::size_t>(d + 1), Polynomial(n));
  e[0] = Polynomial::constant(n, 1.0);
  for (int p = 1; p <= d; ++p) {
    Polynomial s(n);
    for (int f = 1; f <= p; ++f) {
      const double sign = (f % 2 == 1) ? 1.0 : -1.0;
      s += sign * (e[static_cast<std::size_t>(p - f)] * power_trace[static_cast<std::size_t>(f - 1)]);
    }
    e[static_cast<std::size_t>(p)] = (s * (1.0 / p)).pruned(1e-14);
  }
  return {e.begin() + 1, e.end()};
}

std::vector<Polynomial> kimura_constraints(const std::vector<Polynomial>& theta, const HermitianBasis& basis) {
  const int d = basis.dim;
  if (d < 2 || d > 4) {
    throw DimensionError("kimura_constraints: dimension " + std::to_string(d) + " is outside the supported range 2..4");
  }
  if (theta.size() != basis.elements.size()) {
    throw DimensionError("kimura_constraints: expected " + std::to_string(basis.elements.size()) + " coordinates");
  }
  const std::vector<Polynomial> e = elementary_symmetric(PolyMatrix::from_coordinates(theta, basis.elements));
  return {e.begin() + 1, e.end()};
}

}  // namespace ctomo
