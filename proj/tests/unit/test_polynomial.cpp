#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctomo/polynomial.hpp"
#include "../support/test_helpers.hpp"

namespace ctomo {
namespace {

Polynomial random_poly(int n, int degree, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> e(0, degree);
  Polynomial p(n);
  for (int t = 0; t < 12; ++t) {
    Exponents ex(static_cast<std::size_t>(n), 0);
    int left = degree;
    for (auto& x : ex) {
      x = std::uniform_int_distribution<int>(0, left)(rng);
      left -= x;
    }
    p.add_term(ex, u(rng));
  }
  (void)e;
  return p;
}

TEST(Polynomial, ProductOfLinearFactors) {
  const Polynomial x = Polynomial::variable(1, 0);
  const Polynomial one = Polynomial::constant(1, 1.0);
  const Polynomial prod = (x + one) * (x - one);
  EXPECT_EQ(prod.size(), 2u);
  EXPECT_DOUBLE_EQ(prod.coefficient({2}), 1.0);
  EXPECT_DOUBLE_EQ(prod.coefficient({0}), -1.0);
  EXPECT_DOUBLE_EQ(prod.coefficient({1}), 0.0);
  RVector v(1);
  v << 2.0;
  EXPECT_DOUBLE_EQ(prod.evaluate(v), 3.0);
}

TEST(Polynomial, CancellationStoresNoZeroTerms) {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  const Polynomial p = (x + y) - x - y;
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), -1);
  const Polynomial q = x * y - y * x + x;
  EXPECT_EQ(q.size(), 1u);
  for (const auto& [e, c] : q.terms()) EXPECT_NE(c, 0.0);
}

TEST(Polynomial, VariableCountMismatchThrows) {
  EXPECT_THROW(Polynomial::variable(2, 0) + Polynomial::variable(3, 0), DimensionError);
  EXPECT_THROW(Polynomial::variable(2, 0) * Polynomial::variable(3, 0), DimensionError);
  EXPECT_THROW(Polynomial::variable(2, 5), DimensionError);
  Polynomial p(2);
  EXPECT_THROW(p.add_term({1, -1}, 1.0), DimensionError);
  EXPECT_THROW(p.evaluate(RVector::Zero(3)), DimensionError);
}

TEST(Polynomial, EvaluationIsMultiplicative) {
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Polynomial p = random_poly(3, 3, rng);
    const Polynomial q = random_poly(3, 3, rng);
    const Polynomial pq = p * q;
    for (int k = 0; k < 20; ++k) {
      RVector v(3);
      for (auto& x : v) x = n(rng);
      const double expect = p.evaluate(v) * q.evaluate(v);
      EXPECT_NEAR(pq.evaluate(v), expect, 1e-10 * std::max(1.0, std::abs(expect)));
      EXPECT_NEAR((p + q).evaluate(v), p.evaluate(v) + q.evaluate(v), 1e-12 * (1.0 + std::abs(expect)));
    }
  }
}

TEST(Polynomial, SubstituteGradientAndPower) {
  Rng rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const Polynomial p = random_poly(2, 4, rng);
  // x0 -> z0 + 2 z1, x1 -> z0 z1 - 1
  const Polynomial z0 = Polynomial::variable(2, 0), z1 = Polynomial::variable(2, 1);
  const Polynomial s = p.substitute({z0 + 2.0 * z1, z0 * z1 - Polynomial::constant(2, 1.0)});
  for (int k = 0; k < 10; ++k) {
    RVector z(2);
    z << n(rng), n(rng);
    RVector x(2);
    x << z(0) + 2.0 * z(1), z(0) * z(1) - 1.0;
    EXPECT_NEAR(s.evaluate(z), p.evaluate(x), 1e-10 * (1.0 + std::abs(p.evaluate(x))));
    const RVector g = p.gradient(x);
    for (int i = 0; i < 2; ++i) {
      RVector h = x;
      h(i) += 1e-6;
      RVector l = x;
      l(i) -= 1e-6;
      EXPECT_NEAR(g(i), (p.evaluate(h) - p.evaluate(l)) / 2e-6, 1e-5 * (1.0 + std::abs(g(i))));
      EXPECT_NEAR(p.derivative(i).evaluate(x), g(i), 1e-12 * (1.0 + std::abs(g(i))));
    }
    EXPECT_NEAR(p.pow(3).evaluate(x), std::pow(p.evaluate(x), 3), 1e-9 * (1.0 + std::pow(std::abs(p.evaluate(x)), 3)));
  }
}

std::vector<Polynomial> constant_coords(const RVector& theta) {
  std::vector<Polynomial> out;
  for (Index i = 0; i < theta.size(); ++i) out.push_back(Polynomial::constant(0, theta(i)));
  return out;
}

TEST(Kimura, QubitExamples) {
  const HermitianBasis b = gell_mann_basis(2);
  const int n = 4;
  std::vector<Polynomial> theta;
  for (int i = 0; i < n; ++i) theta.push_back(Polynomial::variable(n, i));
  const auto k = kimura_constraints(theta, b);
  ASSERT_EQ(k.size(), 1u);
  RVector mixed(4), pure(4);
  mixed << 1.0 / std::sqrt(2.0), 0.0, 0.0, 0.0;
  pure << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(k[0].evaluate(mixed), 0.25, 1e-14);
  EXPECT_NEAR(k[0].evaluate(pure), 0.0, 1e-14);
  // 2 k_2 = Tr(rho)^2 - Tr(rho^2), and with theta_1 fixed it is an affine image of the ball.
  Rng rng(3);
  std::normal_distribution<double> nd(0.0, 0.4);
  for (int t = 0; t < 20; ++t) {
    RVector v(4);
    v << 1.0 / std::sqrt(2.0), nd(rng), nd(rng), nd(rng);
    const double ball = 0.5 - v.tail(3).squaredNorm();
    EXPECT_NEAR(k[0].evaluate(v), ball / 2.0, 1e-13);
  }
}

TEST(Kimura, QutritSignsMatchEigenvalues) {
  Rng rng(17);
  const HermitianBasis b = gell_mann_basis(3);
  for (int t = 0; t < 20; ++t) {
    const CMatrix rho = testing::random_density(3, rng);
    const auto k = kimura_constraints(constant_coords(parameterize(rho, b).values), b);
    ASSERT_EQ(k.size(), 2u);
    for (const auto& kp : k) EXPECT_GE(kp.constant_term(), -1e-14);
  }
  // A unit-trace indefinite matrix has some negative coefficient.
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 0) = 1.2;
  h(1, 1) = 0.3;
  h(2, 2) = -0.5;
  const CMatrix u = haar_random_unitary(3, rng);
  const auto k = kimura_constraints(constant_coords(parameterize(u * h * u.adjoint(), b).values), b);
  EXPECT_LT(std::min(k[0].constant_term(), k[1].constant_term()), 0.0);
  // Characteristic polynomial oracle: k_2 = sum_{i<j} l_i l_j, k_3 = prod l_i.
  EXPECT_NEAR(k[0].constant_term(), 1.2 * 0.3 - 1.2 * 0.5 - 0.3 * 0.5, 1e-12);
  EXPECT_NEAR(k[1].constant_term(), -1.2 * 0.3 * 0.5, 1e-12);
}

TEST(Kimura, SignAgreementWithEigenvalueOracle) {
  Rng rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int d : {2, 3}) {
    const HermitianBasis b = gell_mann_basis(d);
    int agree = 0, total = 0, psd = 0;
    for (int t = 0; t < 1000; ++t) {
      CMatrix h = testing::random_hermitian(d, rng);
      h -= (h.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
      h /= h.norm();
      const CMatrix m = CMatrix::Identity(d, d) / static_cast<double>(d) + u(rng) * h;
      const double lmin = min_eigenvalue(m);
      if (std::abs(lmin) < 1e-9) continue;
      const auto k = kimura_constraints(constant_coords(parameterize(m, b).values), b);
      bool all_nonneg = true;
      for (const auto& kp : k) all_nonneg = all_nonneg && kp.constant_term() >= 0.0;
      ++total;
      psd += lmin > 0.0;
      agree += all_nonneg == (lmin > 0.0);
    }
    EXPECT_EQ(agree, total) << "d=" << d;
    EXPECT_GT(psd, 100);
    EXPECT_LT(psd, total - 100);
  }
}

TEST(Kimura, DimensionLimits) {
  EXPECT_THROW(kimura_constraints(constant_coords(RVector::Zero(25)), gell_mann_basis(5)), DimensionError);
  EXPECT_THROW(kimura_constraints(constant_coords(RVector::Zero(3)), gell_mann_basis(2)), DimensionError);
  // d = 4 uses the same recursion; check the determinant of a diagonal state.
  const HermitianBasis b = gell_mann_basis(4);
  CMatrix rho = CMatrix::Zero(4, 4);
  rho.diagonal() << 0.4, 0.3, 0.2, 0.1;
  const auto k = kimura_constraints(constant_coords(parameterize(rho, b).values), b);
  ASSERT_EQ(k.size(), 3u);
  EXPECT_NEAR(k[2].constant_term(), 0.4 * 0.3 * 0.2 * 0.1, 1e-14);
}

TEST(PolyMatrix, TraceOfProductMatchesNumeric) {
  Rng rng(31);
  const HermitianBasis b = gell_mann_basis(2);
  const int n = 4;
  std::vector<Polynomial> theta;
  for (int i = 0; i < n; ++i) theta.push_back(Polynomial::variable(n, i));
  const PolyMatrix m = PolyMatrix::from_coordinates(theta, b.elements);
  const Polynomial tr2 = (m * m).trace().re;
  std::normal_distribution<double> nd(0.0, 1.0);
  RVector v(4);
  for (auto& x : v) x = nd(rng);
  const CMatrix numeric = deparameterize(ParamVector{v}, b);
  EXPECT_NEAR(tr2.evaluate(v), (numeric * numeric).trace().real(), 1e-12);
  EXPECT_NEAR(tr2.evaluate(v), v.squaredNorm(), 1e-12);
}

}  // namespace
}  // namespace ctomo
