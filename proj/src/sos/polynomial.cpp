#include "ctomo/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace ctomo {

Polynomial Polynomial::constant(int num_vars, double c) {
  Polynomial p(num_vars);
  p.add_term(Exponents(static_cast<std::size_t>(num_vars), 0), c);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) throw DimensionError("Polynomial::variable: index out of range");
  Exponents e(static_cast<std::size_t>(num_vars), 0);
  e[static_cast<std::size_t>(index)] = 1;
  Polynomial p(num_vars);
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Exponents& e, double c) {
  Polynomial p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::constant_term() const { return coefficient(Exponents(static_cast<std::size_t>(n_), 0)); }

double Polynomial::coefficient(const Exponents& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (static_cast<int>(e.size()) != n_) {
    throw DimensionError("Polynomial: exponent of length " + std::to_string(e.size()) + " in a polynomial of " +
                         std::to_string(n_) + " variables");
  }
  for (int k : e)
    if (k < 0) throw DimensionError("Polynomial: negative exponent");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(const RVector& x) const {
  if (x.size() != n_) throw DimensionError("Polynomial::evaluate: point has wrong length");
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) m *= x(i);
    total += m;
  }
  return total;
}

RVector Polynomial::gradient(const RVector& x) const {
  if (x.size() != n_) throw DimensionError("Polynomial::gradient: point has wrong length");
  RVector g = RVector::Zero(n_);
  for (const auto& [e, c] : terms_) {
    for (int v = 0; v < n_; ++v) {
      const int ev = e[static_cast<std::size_t>(v)];
      if (ev == 0) continue;
      double m = c * ev;
      for (int i = 0; i < n_; ++i) {
        const int p = e[static_cast<std::size_t>(i)] - (i == v ? 1 : 0);
        for (int k = 0; k < p; ++k) m *= x(i);
      }
      g(v) += m;
    }
  }
  return g;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= n_) throw DimensionError("Polynomial::derivative: variable out of range");
  Polynomial d(n_);
  for (const auto& [e, c] : terms_) {
    const int k = e[static_cast<std::size_t>(var)];
    if (k == 0) continue;
    Exponents f = e;
    f[static_cast<std::size_t>(var)] = k - 1;
    d.add_term(f, c * k);
  }
  return d;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& values) const {
  if (static_cast<int>(values.size()) != n_) {
    throw DimensionError("Polynomial::substitute: expected " + std::to_string(n_) + " replacements");
  }
  const int m = values.empty() ? 0 : values.front().num_vars();
  for (const auto& v : values)
    if (v.num_vars() != m) throw DimensionError("Polynomial::substitute: replacements disagree on variable count");
  // Cache powers of each replacement.
  std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(n_));
  auto power = [&](int i, int k) -> const Polynomial& {
    auto& list = powers[static_cast<std::size_t>(i)];
    if (list.empty()) list.push_back(constant(m, 1.0));
    while (static_cast<int>(list.size()) <= k) list.push_back(list.back() * values[static_cast<std::size_t>(i)]);
    return list[static_cast<std::size_t>(k)];
  };
  Polynomial out(m);
  for (const auto& [e, c] : terms_) {
    Polynomial t = constant(m, c);
    for (int i = 0; i < n_; ++i)
      if (e[static_cast<std::size_t>(i)] > 0) t *= power(i, e[static_cast<std::size_t>(i)]);
    out += t;
  }
  return out;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::coefficient_norm() const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += c * c;
  return std::sqrt(s);
}

Polynomial Polynomial::pruned(double rel_tol) const {
  const double cut = rel_tol * max_abs_coefficient();
  Polynomial p(n_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > cut) p.terms_.emplace(e, c);
  return p;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw DimensionError("Polynomial::pow: negative power");
  Polynomial r = constant(n_, 1.0);
  for (int i = 0; i < k; ++i) r *= *this;
  return r;
}

void Polynomial::require_same_vars(const Polynomial& o, const char* what) const {
  if (o.n_ != n_) {
    throw DimensionError(std::string("Polynomial ") + what + ": " + std::to_string(n_) + " vs " +
                         std::to_string(o.n_) + " variables");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  require_same_vars(o, "addition");
  if (&o == this) return *this *= 2.0;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  require_same_vars(o, "subtraction");
  if (&o == this) {
    terms_.clear();
    return *this;
  }
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  require_same_vars(o, "multiplication");
  Polynomial r(n_);
  Exponents e(static_cast<std::size_t>(n_));
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  *this = std::move(r);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  r *= -1.0;
  return r;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    for (int i = 0; i < n_; ++i) {
      const int k = e[static_cast<std::size_t>(i)];
      if (k == 0) continue;
      os << "*" << (static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)] : "x" + std::to_string(i));
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r = a;
  return r *= b;
}
Polynomial operator*(Polynomial a, double s) { return a *= s; }
Polynomial operator*(double s, Polynomial a) { return a *= s; }

ComplexPolynomial& ComplexPolynomial::operator+=(const ComplexPolynomial& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ComplexPolynomial& ComplexPolynomial::operator-=(const ComplexPolynomial& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexPolynomial operator*(const ComplexPolynomial& a, Complex s) {
  return {a.re * s.real() - a.im * s.imag(), a.re * s.imag() + a.im * s.real()};
}

PolyMatrix::PolyMatrix(int side, int num_vars)
    : side_(side), n_(num_vars), e_(static_cast<std::size_t>(side * side), ComplexPolynomial(num_vars)) {}

ComplexPolynomial PolyMatrix::trace() const {
  ComplexPolynomial t(n_);
  for (int i = 0; i < side_; ++i) t += (*this)(i, i);
  return t;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
  if (o.side_ != side_) throw DimensionError("PolyMatrix: side mismatch");
  PolyMatrix r(side_, n_);
  for (int i = 0; i < side_; ++i)
    for (int j = 0; j < side_; ++j)
      for (int k = 0; k < side_; ++k) {
        const ComplexPolynomial& a = (*this)(i, k);
        const ComplexPolynomial& b = o(k, j);
        if ((a.re.is_zero() && a.im.is_zero()) || (b.re.is_zero() && b.im.is_zero())) continue;
        r(i, j) += a * b;
      }
  return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
  if (o.side_ != side_) throw DimensionError("PolyMatrix: side mismatch");
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
  return r;
}

PolyMatrix PolyMatrix::from_coordinates(const std::vector<Polynomial>& coords, const std::vector<CMatrix>& basis) {
  if (coords.size() != basis.size() || coords.empty()) {
    throw DimensionError("PolyMatrix::from_coordinates: coordinate count differs from basis size");
  }
  const int side = static_cast<int>(basis.front().rows());
  const int n = coords.front().num_vars();
  PolyMatrix m(side, n);
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) {
        const Complex v = basis[k](i, j);
        if (v.real() != 0.0) m(i, j).re += coords[k] * v.real();
        if (v.imag() != 0.0) m(i, j).im += coords[k] * v.imag();
      }
  return m;
}

PolyMatrix PolyMatrix::identity(int side, int num_vars) {
  PolyMatrix m(side, num_vars);
  for (int i = 0; i < side; ++i) m(i, i).re = Polynomial::constant(num_vars, 1.0);
  return m;
}

}  // namespace ctomo
