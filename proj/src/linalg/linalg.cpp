#include "ctomo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace ctomo {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_bipartite(const CMatrix& m, Index d1, Index d2, const char* what) {
  if (d1 < 1 || d2 < 1 || m.rows() != d1 * d2 || m.cols() != d1 * d2) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", factors " +
                         std::to_string(d1) + "*" + std::to_string(d2));
  }
}

}  // namespace

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) throw DimensionError(std::string(what) + ": non-finite entry");
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw DimensionError("unvec: length " + std::to_string(v.size()) + " cannot form " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

RVector kron(const RVector& a, const RVector& b) {
  RVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CMatrix commutation_matrix(Index q, Index m) {
  if (q < 1 || m < 1) throw DimensionError("commutation_matrix: sizes must be positive");
  // O is q x m; vec(O)[i + j q] = O(i, j); vec(O^T)[j + i m] = O(i, j).
  CMatrix k = CMatrix::Zero(q * m, q * m);
  for (Index i = 0; i < q; ++i) {
    for (Index j = 0; j < m; ++j) k(j + i * m, i + j * q) = 1.0;
  }
  return k;
}

CVector vec_kron_identity(const CMatrix& a, const CMatrix& b) {
  const Index m = a.rows(), n = a.cols(), p = b.rows(), q = b.cols();
  const CMatrix lift = kron(kron(CMatrix::Identity(n, n), commutation_matrix(q, m)),
                            CMatrix::Identity(p, p));
  return lift * kron(vec(a), vec(b));
}

CMatrix kron_rearrange(const CMatrix& m, Index d1, Index d2) {
  require_bipartite(m, d1, d2, "kron_rearrange");
  CMatrix r(d1 * d1, d2 * d2);
  for (Index i1 = 0; i1 < d1; ++i1)
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index i2 = 0; i2 < d2; ++i2)
        for (Index j2 = 0; j2 < d2; ++j2)
          r(i1 + j1 * d1, i2 + j2 * d2) = m(i1 * d2 + i2, j1 * d2 + j2);
  return r;
}

CMatrix kron_unrearrange(const CMatrix& r, Index d1, Index d2) {
  if (d1 < 1 || d2 < 1 || r.rows() != d1 * d1 || r.cols() != d2 * d2) {
    throw DimensionError("kron_unrearrange: expected " + std::to_string(d1 * d1) + "x" +
                         std::to_string(d2 * d2));
  }
  CMatrix m(d1 * d2, d1 * d2);
  for (Index i1 = 0; i1 < d1; ++i1)
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index i2 = 0; i2 < d2; ++i2)
        for (Index j2 = 0; j2 < d2; ++j2)
          m(i1 * d2 + i2, j1 * d2 + j2) = r(i1 + j1 * d1, i2 + j2 * d2);
  return m;
}

CMatrix partial_trace(const CMatrix& m, Index d1, Index d2, Subsystem traced) {
  require_bipartite(m, d1, d2, "partial_trace");
  if (traced == Subsystem::kFirst) {
    CMatrix out = CMatrix::Zero(d2, d2);
    for (Index k = 0; k < d1; ++k) out += m.block(k * d2, k * d2, d2, d2);
    return out;
  }
  CMatrix out(d1, d1);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d1; ++j) out(i, j) = m.block(i * d2, j * d2, d2, d2).trace();
  return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

HermitianEig hermitian_eig(const CMatrix& m) {
  require_square(m, "hermitian_eig");
  require_finite(m, "hermitian_eig");
  if (!is_hermitian(m)) throw NotHermitianError("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  const Index n = m.rows();
  // Eigen returns ascending values; a stable descending sort keeps its order on ties.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const RVector& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return ev(a) > ev(b); });
  HermitianEig out{RVector(n), CMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = ev(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

SvdFactor best_rank_one(const CMatrix& m) {
  require_finite(m, "best_rank_one");
  if (m.size() == 0 || m.norm() == 0.0) {
    throw DegenerateInputError("best_rank_one: zero matrix has no leading singular pair");
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  SvdFactor f;
  f.sigma = s(0);
  f.residual = s.size() > 1 ? s.tail(s.size() - 1).norm() : 0.0;
  f.degenerate = s.size() > 1 && (s(0) - s(1)) < 1e-12 * s(0);
  f.left = svd.matrixU().col(0);
  f.right = svd.matrixV().col(0);
  Index peak = 0;
  f.left.cwiseAbs().maxCoeff(&peak);
  const Complex phase = std::abs(f.left(peak)) > 0 ? f.left(peak) / std::abs(f.left(peak))
                                                   : Complex(1.0);
  // u v^dagger is unchanged when both vectors carry the same phase.
  f.left *= std::conj(phase);
  f.right *= std::conj(phase);
  f.left(peak) = std::abs(f.left(peak));
  return f;
}

CMatrix polar_unitary(const CMatrix& m) {
  require_square(m, "polar_unitary");
  require_finite(m, "polar_unitary");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) < 1e-10) {
    throw DegenerateInputError("polar_unitary: matrix is singular");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

Index numerical_rank(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

CMatrix pseudo_inverse(const CMatrix& m, double rel_tol) {
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  RVector inv = RVector::Zero(s.size());
  const double cut = s.size() > 0 ? rel_tol * s(0) : 0.0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace ctomo
