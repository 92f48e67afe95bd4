#include <cmath>
#include <string>

#include "ctomo/quantum.hpp"

namespace ctomo {

HermitianBasis gell_mann_basis(int d) {
  if (d < 2) throw DimensionError("gell_mann_basis: dimension must be at least 2");
  HermitianBasis b;
  b.dim = d;
  b.elements.reserve(static_cast<std::size_t>(d * d));
  b.elements.push_back(CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CMatrix s = CMatrix::Zero(d, d);
      s(j, k) = r;
      s(k, j) = r;
      b.elements.push_back(s);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CMatrix a = CMatrix::Zero(d, d);
      a(j, k) = Complex(0.0, -r);
      a(k, j) = Complex(0.0, r);
      b.elements.push_back(a);
    }
  for (int l = 1; l < d; ++l) {
    CMatrix z = CMatrix::Zero(d, d);
    const double n = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (int j = 0; j < l; ++j) z(j, j) = n;
    z(l, l) = -l * n;
    b.elements.push_back(z);
  }
  return b;
}

HermitianBasis product_basis(const HermitianBasis& a, const HermitianBasis& b) {
  HermitianBasis out;
  out.dim = a.dim * b.dim;
  out.elements.reserve(a.elements.size() * b.elements.size());
  for (const auto& x : a.elements)
    for (const auto& y : b.elements) out.elements.push_back(kron(x, y));
  return out;
}

ParamVector parameterize(const CMatrix& obj, const HermitianBasis& basis) {
  if (obj.rows() != basis.dim || obj.cols() != basis.dim) {
    throw DimensionError("parameterize: object is " + std::to_string(obj.rows()) +
                         "-dimensional, basis is " + std::to_string(basis.dim));
  }
  ParamVector theta{RVector(static_cast<Index>(basis.elements.size()))};
  for (std::size_t i = 0; i < basis.elements.size(); ++i) {
    // Tr(Omega_i obj) with Omega_i Hermitian equals the Frobenius inner product.
    theta.values(static_cast<Index>(i)) =
        (basis.elements[i].conjugate().cwiseProduct(obj)).sum().real();
  }
  return theta;
}

CMatrix deparameterize(const ParamVector& theta, const HermitianBasis& basis) {
  if (theta.values.size() != static_cast<Index>(basis.elements.size())) {
    throw DimensionError("deparameterize: expected " +
                         std::to_string(basis.elements.size()) + " coefficients, got " +
                         std::to_string(theta.values.size()));
  }
  CMatrix out = CMatrix::Zero(basis.dim, basis.dim);
  for (std::size_t i = 0; i < basis.elements.size(); ++i)
    out += theta.values(static_cast<Index>(i)) * basis.elements[i];
  return out;
}

}  // namespace ctomo
