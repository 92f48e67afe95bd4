#include <cmath>
#include <string>

#include "ctomo/quantum.hpp"

namespace ctomo {

namespace {

int side_root(Index n, const char* what) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (d < 1 || static_cast<Index>(d) * d != n) {
    throw DimensionError(std::string(what) + ": side " + std::to_string(n) +
                         " is not a perfect square");
  }
  return d;
}

}  // namespace

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(hermitian),
                                                Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

QuantumState::QuantumState(CMatrix rho, const Tolerances& tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
    throw InvalidObjectError("QuantumState: density matrix must be square and nonempty");
  }
  require_finite(rho_, "QuantumState");
  if (!is_hermitian(rho_, tol.hermitian)) throw InvalidObjectError("QuantumState: not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > tol.trace) {
    throw InvalidObjectError("QuantumState: trace " + std::to_string(rho_.trace().real()) +
                             " differs from 1");
  }
  if (min_eigenvalue(rho_) < -tol.psd) throw InvalidObjectError("QuantumState: not PSD");
}

QuantumState QuantumState::pure(const CVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw DegenerateInputError("QuantumState::pure: zero vector");
  const CVector u = psi / n;
  return QuantumState(u * u.adjoint());
}

Povm::Povm(std::vector<CMatrix> elements, const Tolerances& tol)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw InvalidObjectError("Povm: no elements");
  dim_ = static_cast<int>(elements_.front().rows());
  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (std::size_t l = 0; l < elements_.size(); ++l) {
    const CMatrix& p = elements_[l];
    if (p.rows() != dim_ || p.cols() != dim_) {
      throw InvalidObjectError("Povm: element " + std::to_string(l) + " has wrong dimension");
    }
    require_finite(p, "Povm");
    if (!is_hermitian(p, tol.hermitian)) {
      throw InvalidObjectError("Povm: element " + std::to_string(l) + " is not Hermitian");
    }
    if (min_eigenvalue(p) < -tol.psd) {
      throw InvalidObjectError("Povm: element " + std::to_string(l) + " is not PSD");
    }
    sum += p;
  }
  const double gap = (sum - CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  if (gap > tol.completeness) {
    throw InvalidObjectError("Povm: elements sum to identity only within " +
                             std::to_string(gap));
  }
}

ProcessMatrix::ProcessMatrix(CMatrix x, bool trace_preserving, const Tolerances& tol)
    : x_(std::move(x)), tp_(trace_preserving) {
  if (x_.rows() != x_.cols()) throw InvalidObjectError("ProcessMatrix: not square");
  dim_ = side_root(x_.rows(), "ProcessMatrix");
  require_finite(x_, "ProcessMatrix");
  if (!is_hermitian(x_, tol.hermitian)) throw InvalidObjectError("ProcessMatrix: not Hermitian");
  if (min_eigenvalue(x_) < -tol.psd) throw InvalidObjectError("ProcessMatrix: not PSD");
  const CMatrix reduced = partial_trace(x_, dim_, dim_, Subsystem::kFirst);
  const CMatrix id = CMatrix::Identity(dim_, dim_);
  if (tp_) {
    if ((reduced - id).cwiseAbs().maxCoeff() > tol.partial_trace) {
      throw InvalidObjectError("ProcessMatrix: partial trace differs from identity");
    }
  } else if (min_eigenvalue(id - reduced) < -tol.partial_trace) {
    throw InvalidObjectError("ProcessMatrix: partial trace exceeds identity");
  }
}

CMatrix natural_basis_element(int d, int i) {
  if (i < 0 || i >= d * d) throw DimensionError("natural_basis_element: index out of range");
  CMatrix e = CMatrix::Zero(d, d);
  e(i / d, i % d) = 1.0;
  return e;
}

CMatrix process_from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw DimensionError("process_from_kraus: empty Kraus set");
  const Index d = kraus.front().rows();
  CMatrix c(static_cast<Index>(kraus.size()), d * d);
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    if (kraus[i].rows() != d || kraus[i].cols() != d) {
      throw DimensionError("process_from_kraus: inconsistent Kraus dimensions");
    }
    c.row(static_cast<Index>(i)) = vec(kraus[i].transpose()).transpose();
  }
  return c.transpose() * c.conjugate();
}

CMatrix apply_kraus(const std::vector<CMatrix>& kraus, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& a : kraus) out += a * rho * a.adjoint();
  return out;
}

CMatrix apply_process(const CMatrix& x, const CMatrix& rho) {
  const int d = side_root(x.rows(), "apply_process");
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("apply_process: state dimension");
  // E_j rho E_k^dagger with E_j = |a><b|, E_k = |c><e| contributes rho(b,e) at (a,c).
  CMatrix out = CMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) out(a, c) += x(a * d + b, c * d + e) * rho(b, e);
  return out;
}

CMatrix collective_permutation(int d1, int d2) {
  return kron(kron(CMatrix::Identity(d1, d1), commutation_matrix(d2, d1)),
              CMatrix::Identity(d2, d2));
}

CMatrix joint_process(const CMatrix& x1, int d1, const CMatrix& x2, int d2) {
  const CMatrix k = collective_permutation(d1, d2);
  return k * kron(x1, x2) * k.transpose();
}

double purity(const QuantumState& s) {
  return (s.matrix() * s.matrix()).trace().real();
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace ctomo
