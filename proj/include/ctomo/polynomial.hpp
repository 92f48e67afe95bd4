#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctomo/quantum.hpp"

namespace ctomo {

using Exponents = std::vector<int>;

// Sparse real multivariate polynomial; terms with zero coefficient are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int num_vars) : n_(num_vars) {}

  static Polynomial constant(int num_vars, double c);
  static Polynomial variable(int num_vars, int index);
  static Polynomial monomial(const Exponents& e, double c);

  int num_vars() const { return n_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  // -1 for the zero polynomial.
  int degree() const;
  double constant_term() const;
  double coefficient(const Exponents& e) const;
  void add_term(const Exponents& e, double c);

  double evaluate(const RVector& x) const;
  RVector gradient(const RVector& x) const;
  Polynomial derivative(int var) const;

  // Replaces x_i by values[i]; the result lives in the variables of `values`.
  Polynomial substitute(const std::vector<Polynomial>& values) const;

  double max_abs_coefficient() const;
  double coefficient_norm() const;
  // Drops terms with |c| <= tol * max|c|.
  Polynomial pruned(double rel_tol) const;

  Polynomial pow(int k) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(double s);
  Polynomial operator-() const;

  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  void require_same_vars(const Polynomial& o, const char* what) const;

  int n_ = 0;
  std::map<Exponents, double> terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(Polynomial a, double s);
Polynomial operator*(double s, Polynomial a);

struct ComplexPolynomial {
  Polynomial re;
  Polynomial im;

  explicit ComplexPolynomial(int num_vars = 0) : re(num_vars), im(num_vars) {}
  ComplexPolynomial(Polynomial r, Polynomial i) : re(std::move(r)), im(std::move(i)) {}

  ComplexPolynomial conj() const { return {re, -im}; }
  ComplexPolynomial& operator+=(const ComplexPolynomial& o);
  ComplexPolynomial& operator-=(const ComplexPolynomial& o);
};

ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b);
ComplexPolynomial operator*(const ComplexPolynomial& a, Complex s);

// Dense square matrix of complex polynomials.
class PolyMatrix {
 public:
  PolyMatrix(int side, int num_vars);

  int side() const { return side_; }
  int num_vars() const { return n_; }
  ComplexPolynomial& operator()(int r, int c) { return e_[static_cast<std::size_t>(r * side_ + c)]; }
  const ComplexPolynomial& operator()(int r, int c) const { return e_[static_cast<std::size_t>(r * side_ + c)]; }

  ComplexPolynomial trace() const;
  PolyMatrix operator*(const PolyMatrix& o) const;
  PolyMatrix operator-(const PolyMatrix& o) const;

  // sum_i coords[i] * basis[i].
  static PolyMatrix from_coordinates(const std::vector<Polynomial>& coords, const std::vector<CMatrix>& basis);
  static PolyMatrix identity(int side, int num_vars);

 private:
  int side_;
  int n_;
  std::vector<ComplexPolynomial> e_;
};

// Coefficients e_1..e_d of the characteristic polynomial of a Hermitian
// polynomial matrix (real parts), via Newton's identities on Tr(A^f).
std::vector<Polynomial> elementary_symmetric(const PolyMatrix& a);

// k_2..k_d for rho = sum_i theta_i Omega_i; together with Tr(rho) = 1 their
// nonnegativity is equivalent to rho >= 0. Supported for 2 <= d <= 4.
std::vector<Polynomial> kimura_constraints(const std::vector<Polynomial>& theta, const HermitianBasis& basis);

}  // namespace ctomo
