#include <cmath>
#include <string>

#include "ctomo/estimators.hpp"

namespace ctomo {

PureTruncation truncate_pure(const QuantumState& s) {
  const HermitianEig eig = hermitian_eig(s.matrix());
  PureTruncation out{QuantumState::pure(eig.vectors.col(0)), false};
  out.degenerate = eig.values.size() > 1 && (eig.values(0) - eig.values(1)) < 1e-12;
  return out;
}

CMatrix extract_unitary(const ProcessMatrix& x) {
  const HermitianEig eig = hermitian_eig(x.matrix());
  const int d = x.dim();
  // A single Kraus operator G gives X = vec(G^T) vec(G^T)^dagger in the natural basis.
  const CVector v = std::sqrt(std::max(0.0, eig.values(0))) * eig.vectors.col(0);
  CMatrix g = polar_unitary(unvec(v, d, d).transpose());
  Index r = 0, c = 0;
  g.cwiseAbs().maxCoeff(&r, &c);
  const Complex e = g(r, c);
  return g * (std::abs(e) > 0 ? std::conj(e) / std::abs(e) : Complex(1.0));
}

PurityEstimate estimate_qubit_with_purity(const RVector& frequencies) {
  if (frequencies.size() != 5) {
    throw DimensionError("estimate_qubit_with_purity: expected 5 outcome frequencies, got " +
                         std::to_string(frequencies.size()));
  }
  const HermitianBasis basis = gell_mann_basis(2);
  const std::vector<CVector> sic = sic_qubit_vectors();
  // (3/4) <psi_l|rho|psi_l>^2 is the probability of outcome l.
  RMatrix a(4, 3);
  RVector q(4);
  const double first = 1.0 / std::sqrt(2.0);
  for (int l = 0; l < 4; ++l) {
    const RVector phi = parameterize(sic[static_cast<std::size_t>(l)] * sic[static_cast<std::size_t>(l)].adjoint(), basis).values;
    a.row(l) = phi.tail(3).transpose();
    q(l) = std::sqrt(std::max(0.0, 4.0 * frequencies(l) / 3.0)) - first * phi(0);
  }
  const RVector bloch = a.colPivHouseholderQr().solve(q);

  PurityEstimate out{QuantumState(CMatrix::Identity(2, 2) / 2.0), RVector(4), 0.0, false};
  double target = 0.5 - 2.0 * frequencies(4);
  if (target < 0.0) {
    target = 0.0;
    out.clamped = true;
  }
  const double norm2 = bloch.squaredNorm();
  RVector scaled = RVector::Zero(3);
  if (norm2 > 1e-12) {
    scaled = bloch * std::sqrt(target / norm2);
  } else if (target > 1e-12) {
    throw DegenerateInputError("estimate_qubit_with_purity: Bloch direction undefined");
  }
  out.theta << first, scaled;
  out.target_purity = 0.5 + target;
  out.state = QuantumState(hermitian_part(deparameterize(ParamVector{out.theta}, basis)));
  return out;
}

}  // namespace ctomo
