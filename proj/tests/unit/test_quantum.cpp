#include <gtest/gtest.h>

#include <cmath>

#include "ctomo/quantum.hpp"
#include "ctomo/quantum_io.hpp"
#include "../support/test_helpers.hpp"

namespace ctomo {
namespace {

const double kRt2 = std::sqrt(2.0);

CMatrix gram(const HermitianBasis& b) {
  const Index n = static_cast<Index>(b.elements.size());
  CMatrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = (b.elements[i].adjoint() * b.elements[j]).trace();
  return g;
}

CMatrix ket_bra(const CVector& v) { return v * v.adjoint(); }

TEST(GellMann, QubitIsPauli) {
  const HermitianBasis b = gell_mann_basis(2);
  ASSERT_EQ(b.elements.size(), 4u);
  EXPECT_LT((b.elements[0] - CMatrix::Identity(2, 2) / kRt2).norm(), 1e-15);
  EXPECT_LT((b.elements[1] - pauli_x() / kRt2).norm(), 1e-15);
  EXPECT_LT((b.elements[2] - pauli_y() / kRt2).norm(), 1e-15);
  EXPECT_LT((b.elements[3] - pauli_z() / kRt2).norm(), 1e-15);
}

TEST(GellMann, OrthonormalAndTraceless) {
  for (int d = 2; d <= 4; ++d) {
    const HermitianBasis b = gell_mann_basis(d);
    ASSERT_EQ(b.elements.size(), static_cast<std::size_t>(d * d));
    EXPECT_LT((gram(b) - CMatrix::Identity(d * d, d * d)).norm(), 1e-12);
    EXPECT_LT((b.elements[0] - CMatrix::Identity(d, d) / std::sqrt(double(d))).norm(), 1e-15);
    for (std::size_t j = 1; j < b.elements.size(); ++j) {
      EXPECT_LT(std::abs(b.elements[j].trace()), 1e-15);
      EXPECT_TRUE(is_hermitian(b.elements[j]));
    }
  }
  EXPECT_THROW(gell_mann_basis(1), DimensionError);
}

TEST(Parameterize, KnownStates) {
  const HermitianBasis b = gell_mann_basis(2);
  ParamVector t = parameterize(CMatrix::Identity(2, 2) / 2.0, b);
  EXPECT_NEAR(t.values(0), 1 / kRt2, 1e-15);
  EXPECT_NEAR(t.values.tail(3).norm(), 0.0, 1e-15);
  CMatrix zero = CMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  t = parameterize(zero, b);
  EXPECT_NEAR(t.values(0), 1 / kRt2, 1e-15);
  EXPECT_NEAR(t.values(1), 0.0, 1e-15);
  EXPECT_NEAR(t.values(2), 0.0, 1e-15);
  EXPECT_NEAR(t.values(3), 1 / kRt2, 1e-15);
  EXPECT_THROW(parameterize(CMatrix::Identity(3, 3), b), DimensionError);
}

TEST(Parameterize, RoundTripAndTrace) {
  Rng rng(21);
  for (int d = 2; d <= 3; ++d) {
    const HermitianBasis b = gell_mann_basis(d);
    for (int t = 0; t < 20; ++t) {
      const CMatrix rho = testing::random_density(d, rng);
      EXPECT_LT((deparameterize(parameterize(rho, b), b) - rho).norm(), 1e-12);
      ParamVector theta{RVector::Random(d * d)};
      const CMatrix h = deparameterize(theta, b);
      EXPECT_NEAR(h.trace().real(), std::sqrt(double(d)) * theta.values(0), 1e-12);
      EXPECT_LT((parameterize(h, b).values - theta.values).norm(), 1e-12);
    }
  }
  EXPECT_TRUE(deparameterize(ParamVector{RVector::Zero(4)}, gell_mann_basis(2)).isZero(0));
  EXPECT_THROW(deparameterize(ParamVector{RVector::Zero(3)}, gell_mann_basis(2)), DimensionError);
}

TEST(Validation, RejectsInvalidObjects) {
  EXPECT_THROW(QuantumState(CMatrix::Identity(2, 2)), InvalidObjectError);
  EXPECT_THROW(QuantumState{pauli_z()}, InvalidObjectError);
  CMatrix nonherm = CMatrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.3;
  EXPECT_THROW(QuantumState{nonherm}, InvalidObjectError);
  EXPECT_THROW(Povm({CMatrix::Identity(2, 2) / 2.0}), InvalidObjectError);
  EXPECT_THROW(ProcessMatrix(2.0 * identity_process(2).matrix(), true), InvalidObjectError);
  EXPECT_NO_THROW(ProcessMatrix(0.5 * identity_process(2).matrix(), false));
}

TEST(Mub, BasisAAndUnbiasedness) {
  const MubSet mub = mub_states_and_measurements();
  ASSERT_EQ(mub.states.size(), 20u);
  ASSERT_EQ(mub.settings.size(), 5u);
  for (int i = 0; i < 4; ++i) {
    CMatrix e = CMatrix::Zero(4, 4);
    e(i, i) = 1.0;
    EXPECT_LT((mub.settings[0][i] - e).norm(), 1e-15);
  }
  for (int a = 0; a < 5; ++a) {
    CMatrix sum = CMatrix::Zero(4, 4);
    for (int m = 0; m < 4; ++m) sum += mub.settings[a][m];
    EXPECT_LT((sum - CMatrix::Identity(4, 4)).norm(), 1e-12);
    for (int b = a + 1; b < 5; ++b)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          const double overlap = (mub.states[4 * a + m].matrix() * mub.states[4 * b + n].matrix()).trace().real();
          EXPECT_NEAR(overlap, 0.25, 1e-12);
        }
  }
}

TEST(Sic, TetrahedronAndCompleteness) {
  const Povm sic = sic_qubit();
  const auto v = sic_qubit_vectors();
  CMatrix sum = CMatrix::Zero(2, 2);
  for (std::size_t l = 0; l < 4; ++l) {
    sum += sic[l];
    EXPECT_NEAR(sic[l].trace().real(), 0.5, 1e-15);
    EXPECT_EQ(numerical_rank(sic[l]), 1);
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_NEAR(std::norm(v[l].dot(v[k])), (2.0 * (l == k) + 1.0) / 3.0, 1e-12);
  }
  EXPECT_LT((sum - CMatrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_NEAR(std::norm(v[0].dot(v[1])), 1.0 / 3.0, 1e-12);
}

TEST(Collective, TwoCopyPovm) {
  const Povm p = collective_two_copy_povm();
  ASSERT_EQ(p.size(), 5u);
  CMatrix sum = CMatrix::Zero(4, 4);
  for (const auto& e : p.elements()) sum += e;
  EXPECT_LT((sum - CMatrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_EQ(numerical_rank(p[4]), 1);
  EXPECT_NEAR(p[4].trace().real(), 1.0, 1e-12);
  Rng rng(22);
  const HermitianBasis b = gell_mann_basis(2);
  for (int t = 0; t < 20; ++t) {
    const CMatrix rho = testing::random_density(2, rng);
    const RVector theta = parameterize(rho, b).values;
    const double p5 = (p[4] * kron(rho, rho)).trace().real();
    EXPECT_NEAR(p5, 0.25 - theta.tail(3).squaredNorm() / 2.0, 1e-12);
  }
}

TEST(Collective, ThreeCopyPovm) {
  const Povm p = collective_three_copy_povm();
  ASSERT_EQ(p.size(), 7u);
  CMatrix sum = CMatrix::Zero(8, 8);
  for (const auto& e : p.elements()) sum += e;
  EXPECT_LT((sum - CMatrix::Identity(8, 8)).norm(), 1e-12);
  EXPECT_GE(min_eigenvalue(p[6]), -1e-12);
  EXPECT_NEAR(p[0].trace().real(), 2.0 / 3.0, 1e-12);
}

TEST(Channels, BitPhaseFlip) {
  EXPECT_LT((bit_phase_flip(1.0).matrix() - vec(CMatrix::Identity(2, 2)) * vec(CMatrix::Identity(2, 2)).adjoint()).norm(),
            1e-15);
  Rng rng(23);
  const CMatrix rho = testing::random_density(2, rng);
  EXPECT_LT((apply_process(bit_phase_flip(0.0).matrix(), rho) - pauli_y() * rho * pauli_y()).norm(), 1e-12);
  CMatrix zero = CMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  const CMatrix out = apply_process(bit_phase_flip(0.8).matrix(), zero);
  EXPECT_NEAR(out(0, 0).real(), 0.8, 1e-12);
  EXPECT_NEAR(out(1, 1).real(), 0.2, 1e-12);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.0, 1e-12);
  const ProcessMatrix x = bit_phase_flip(0.8);
  EXPECT_LE(numerical_rank(x.matrix()), 2);
  EXPECT_NEAR(x.matrix().trace().real(), 2.0, 1e-12);
  EXPECT_THROW(bit_phase_flip(1.5), InvalidObjectError);
}

TEST(Channels, KrausAgreesWithProcessMatrix) {
  Rng rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double p = u(rng);
    const CMatrix rho = testing::random_density(2, rng);
    EXPECT_LT((apply_kraus(bit_phase_flip_kraus(p), rho) - apply_process(bit_phase_flip(p).matrix(), rho)).norm(), 1e-12);
  }
  const auto ks = testing::random_kraus(3, 2, rng);
  const CMatrix rho = testing::random_density(3, rng);
  const ProcessMatrix x(process_from_kraus(ks), true);
  EXPECT_LT((apply_kraus(ks, rho) - apply_process(x.matrix(), rho)).norm(), 1e-12);
}

TEST(Channels, JointProcessActsOnProducts) {
  Rng rng(25);
  const CMatrix x1 = process_from_kraus(testing::random_kraus(2, 2, rng));
  const CMatrix x2 = process_from_kraus(testing::random_kraus(2, 3, rng));
  const CMatrix r1 = testing::random_density(2, rng), r2 = testing::random_density(2, rng);
  const CMatrix joint = joint_process(x1, 2, x2, 2);
  EXPECT_LT((apply_process(joint, kron(r1, r2)) - kron(apply_process(x1, r1), apply_process(x2, r2))).norm(), 1e-12);
}

TEST(Random, HaarUnitary) {
  Rng a(26), b(26);
  const CMatrix u = haar_random_unitary(3, a);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_EQ(u, haar_random_unitary(3, b));
  Rng rng(27);
  const int draws = 10000, d = 3;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double v = std::norm(haar_random_unitary(d, rng)(0, 0));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  EXPECT_LT(std::abs(mean - 1.0 / d), 3.0 * se);
}

TEST(Random, StatesFromSpectrum) {
  Rng rng(28);
  EXPECT_NEAR(purity(random_state(2, {1.0, 0.0}, rng)), 1.0, 1e-12);
  EXPECT_NEAR(purity(random_state(2, {0.9, 0.1}, rng)), 0.82, 1e-12);
  EXPECT_LT((random_state(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, rng).matrix() - CMatrix::Identity(3, 3) / 3.0).norm(), 1e-12);
  EXPECT_THROW(random_state(2, {0.7, 0.7}, rng), InvalidObjectError);
}

TEST(Purity, Values) {
  EXPECT_NEAR(purity(QuantumState(CMatrix::Identity(2, 2) / 2.0)), 0.5, 1e-15);
  Rng rng(29);
  EXPECT_NEAR(purity(QuantumState::pure(random_pure_vector(3, rng))), 1.0, 1e-12);
  RVector theta(4);
  theta << 1 / kRt2, 0.3, 0.1, 0.2;
  const CMatrix rho = deparameterize(ParamVector{theta}, gell_mann_basis(2));
  EXPECT_NEAR(purity(QuantumState(rho)), 0.64, 1e-12);
}

TEST(BuiltinFamilies, BornProbabilitiesNormalized) {
  Rng rng(30);
  std::vector<Povm> povms = {sic_qubit(), computational_povm(2)};
  const MubSet mub = mub_states_and_measurements();
  for (const auto& s : mub.settings) povms.push_back(s);
  povms.push_back(collective_two_copy_povm());
  povms.push_back(collective_three_copy_povm());
  for (const auto& p : povms) {
    for (int t = 0; t < 10; ++t) {
      const CMatrix rho = testing::random_density(p.dim(), rng);
      double total = 0.0;
      for (const auto& e : p.elements()) {
        const double prob = (e * rho).trace().real();
        EXPECT_GE(prob, -1e-12);
        total += prob;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Serialization, RoundTrip) {
  Rng rng(31);
  const QuantumState s(testing::random_density(3, rng));
  EXPECT_EQ(state_from_json(to_json(s)).matrix(), s.matrix());
  const Povm p = sic_qubit();
  const Povm q = povm_from_json(to_json(p));
  for (std::size_t l = 0; l < p.size(); ++l) EXPECT_EQ(q[l], p[l]);
  const ProcessMatrix x = bit_phase_flip(0.7);
  const ProcessMatrix y = process_from_json(to_json(x));
  EXPECT_EQ(y.matrix(), x.matrix());
  EXPECT_TRUE(y.trace_preserving());
  EXPECT_EQ(to_json(s)["dim"], 3);
}

TEST(Serialization, RejectsMalformed) {
  nlohmann::json j = to_json(QuantumState(CMatrix::Identity(2, 2) / 2.0));
  j["matrix"][0] = nlohmann::json::array({1});
  EXPECT_ANY_THROW(state_from_json(j));
  EXPECT_ANY_THROW(state_from_json(nlohmann::json::object()));
}

}  // namespace
}  // namespace ctomo
