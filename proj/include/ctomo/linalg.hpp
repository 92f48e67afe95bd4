#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "ctomo/errors.hpp"

namespace ctomo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-10;

// Throws DimensionError on NaN/Inf entries.
void require_finite(const CMatrix& m, const char* what);

// Column-major stacking.
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Index rows, Index cols);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);
RVector kron(const RVector& a, const RVector& b);

// K_{qm} with K vec(O) = vec(O^T) for every q x m matrix O.
CMatrix commutation_matrix(Index q, Index m);

// (I_n (x) K_{qm} (x) I_p)(vec(a) (x) vec(b)) for a: m x n, b: p x q.
CVector vec_kron_identity(const CMatrix& a, const CMatrix& b);

// Rearrangement of a (d1 d2)x(d1 d2) matrix into d1^2 x d2^2 so that
// A (x) B maps to vec(A) vec(B)^T.
CMatrix kron_rearrange(const CMatrix& m, Index d1, Index d2);
CMatrix kron_unrearrange(const CMatrix& r, Index d1, Index d2);

enum class Subsystem { kFirst, kSecond };

CMatrix partial_trace(const CMatrix& m, Index d1, Index d2, Subsystem traced);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTolerance);
CMatrix hermitian_part(const CMatrix& m);

struct HermitianEig {
  RVector values;   // descending
  CMatrix vectors;  // columns
};

// Rejects inputs whose anti-Hermitian part exceeds 1e-10 relative to the norm.
HermitianEig hermitian_eig(const CMatrix& m);

struct SvdFactor {
  CVector left;
  CVector right;
  double sigma = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

// sigma * left * right^dagger is the Frobenius-nearest rank-one matrix.
// The largest-magnitude entry of `left` is real and nonnegative.
SvdFactor best_rank_one(const CMatrix& m);

CMatrix polar_unitary(const CMatrix& m);

// Numerical rank with threshold rel_tol * sigma_max.
Index numerical_rank(const CMatrix& m, double rel_tol = 1e-8);

// Minimum-norm least-squares pseudoinverse with relative cutoff.
CMatrix pseudo_inverse(const CMatrix& m, double rel_tol = 1e-12);

}  // namespace ctomo
