#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctomo/sos.hpp"
#include "../support/test_helpers.hpp"

namespace ctomo {
namespace {

std::vector<QuantumState> pure_probes(int d, int count, Rng& rng) {
  std::vector<QuantumState> out;
  for (int i = 0; i < count; ++i) out.push_back(QuantumState::pure(random_pure_vector(d, rng)));
  return out;
}

LinearModel qst_model(const CMatrix& r1, const CMatrix& r2) {
  const HermitianBasis b = gell_mann_basis(2);
  LinearModel m = build_phi(mub_scheme(), {b, b});
  attach_probabilities(m, setting_probabilities(mub_scheme(), kron(r1, r2)));
  return m;
}

LinearModel noisy_qst_model(const CMatrix& r1, const CMatrix& r2, long shots, Rng& rng) {
  const HermitianBasis b = gell_mann_basis(2);
  LinearModel m = build_phi(mub_scheme(), {b, b});
  attach_counts(m, sample_counts(setting_probabilities(mub_scheme(), kron(r1, r2)), shots, rng));
  return m;
}

CMatrix mixed_qubit(Rng& rng) { return random_state(2, {0.9, 0.1}, rng).matrix(); }

SemialgebraicProgram univariate(const Polynomial& f) {
  SemialgebraicProgram p;
  p.num_vars = f.num_vars();
  p.objective = f;
  return p;
}

TEST(SosProgram, QubitIdenticalStateShape) {
  Rng rng(1);
  const CMatrix rho = mixed_qubit(rng);
  const SemialgebraicProgram p = build_sos_program(SosTask::kQstI, qst_model(rho, rho));
  EXPECT_EQ(p.num_vars, 3);
  EXPECT_EQ(p.objective.degree(), 4);
  ASSERT_EQ(p.inequalities.size(), 1u);
  EXPECT_EQ(p.count_inequalities("ball"), 1u);
  // The ball constraint is 1/2 - sum theta_i^2.
  RVector x = RVector::Zero(3);
  EXPECT_DOUBLE_EQ(p.inequalities[0].evaluate(x), 0.5);
  x << 0.5, 0.5, 0.0;
  EXPECT_NEAR(p.inequalities[0].evaluate(x), 0.0, 1e-15);
  EXPECT_TRUE(p.equalities.empty());
  // The objective vanishes at the truth.
  const RVector truth = encode(p, {{rho}});
  EXPECT_NEAR(p.cost(truth), 0.0, 1e-14);
}

TEST(SosProgram, QubitIdenticalDetectorShape) {
  Rng rng(2);
  const HermitianBasis b = gell_mann_basis(2);
  const auto probes = pure_probes(4, 20, rng);
  const auto elems = testing::random_povm_elements(2, 3, rng);
  const Povm povm(elems);
  LinearModel m = build_theta(probes, b, b, 3, 3);
  attach_probabilities(m, setting_probabilities(probes, povm, povm));
  const SemialgebraicProgram p = build_sos_program(SosTask::kQdtI, m);
  EXPECT_EQ(p.num_vars, 12);
  EXPECT_EQ(p.equalities.size(), 4u);
  EXPECT_EQ(p.count_inequalities("ball"), 3u);
  EXPECT_EQ(p.count_inequalities("trace"), 3u);
  EXPECT_EQ(p.count_inequalities("kimura"), 3u);
  const RVector truth = encode(p, {elems});
  EXPECT_NEAR(p.cost(truth), 0.0, 1e-13);
  EXPECT_LT(p.violation(truth), 1e-12);

  ProgramOptions no_ball;
  no_ball.ball_constraints = false;
  EXPECT_EQ(build_sos_program(SosTask::kQdtI, m, no_ball).count_inequalities("ball"), 0u);
}

TEST(SosProgram, PureStateAndUnitaryShapes) {
  Rng rng(3);
  const CVector a = random_pure_vector(2, rng), c = random_pure_vector(2, rng);
  const SemialgebraicProgram pure =
      build_sos_program(SosTask::kPureState, qst_model(a * a.adjoint(), c * c.adjoint()));
  EXPECT_EQ(pure.num_vars, 8);
  EXPECT_EQ(pure.objective.degree(), 8);
  EXPECT_EQ(pure.equalities.size(), 2u);
  BlockValues v{{CMatrix(a * a.adjoint()), CMatrix(a)}, {CMatrix(c * c.adjoint()), CMatrix(c)}};
  const RVector truth = encode(pure, v);
  EXPECT_NEAR(pure.cost(truth), 0.0, 1e-13);
  EXPECT_LT(pure.violation(truth), 1e-13);
  // Relaxing the degree-8 program needs order 4, which is above the moment budget.
  EXPECT_THROW(lasserre_relaxation(pure), SizeLimitError);

  const auto probes = pure_probes(4, 16, rng);
  LinearModel qpt = build_collective_process_model(probes, mub_scheme(), 2, 2);
  const CMatrix u = haar_random_unitary(2, rng);
  const CMatrix x = process_from_kraus({u});
  attach_probabilities(qpt, setting_probabilities(qpt, probes, mub_scheme(), joint_process(x, 2, x, 2)));
  const SemialgebraicProgram unitary = build_sos_program(SosTask::kUnitary, qpt);
  EXPECT_EQ(unitary.num_vars, 8);
  EXPECT_EQ(unitary.equalities.size(), 4u);
  EXPECT_EQ(unitary.objective.degree(), 8);
  const RVector ut = encode(unitary, {{u}});
  EXPECT_NEAR(unitary.cost(ut), 0.0, 1e-12);
  EXPECT_LT(unitary.violation(ut), 1e-13);
}

TEST(SosProgram, ProcessProgramsAndErrors) {
  Rng rng(4);
  const auto probes = pure_probes(4, 16, rng);
  LinearModel qpt = build_collective_process_model(probes, mub_scheme(), 2, 2);
  const CMatrix x1 = bit_phase_flip(0.8).matrix(), x2 = bit_phase_flip(0.7).matrix();
  attach_probabilities(qpt, setting_probabilities(qpt, probes, mub_scheme(), joint_process(x1, 2, x2, 2)));
  const SemialgebraicProgram p = build_sos_program(SosTask::kQptD, qpt);
  EXPECT_EQ(p.num_vars, 32);
  EXPECT_EQ(p.equalities.size(), 8u);
  const RVector truth = encode(p, {{x1}, {x2}});
  EXPECT_NEAR(p.cost(truth), 0.0, 1e-12);
  EXPECT_LT(p.violation(truth), 1e-12);

  ProgramOptions fam;
  fam.families = {bit_phase_flip_family(), bit_phase_flip_family()};
  const SemialgebraicProgram pf = build_sos_program(SosTask::kQptD, qpt, fam);
  EXPECT_EQ(pf.num_vars, 2);
  RVector pv(2);
  pv << 0.8, 0.7;
  EXPECT_NEAR(pf.cost(pv), 0.0, 1e-12);

  fam.families.pop_back();
  EXPECT_THROW(build_sos_program(SosTask::kQptD, qpt, fam), ConfigError);
  const HermitianBasis b = gell_mann_basis(2);
  LinearModel empty = build_phi(mub_scheme(), {b, b});
  EXPECT_THROW(build_sos_program(SosTask::kQstI, empty), ConfigError);
  EXPECT_THROW(build_sos_program(SosTask::kQdtI, qst_model(mixed_qubit(rng), mixed_qubit(rng))), ConfigError);
}

TEST(Relaxation, UnconstrainedQuartic) {
  const Polynomial x = Polynomial::variable(1, 0);
  const Polynomial f = (x * x - Polynomial::constant(1, 1.0)).pow(2);
  const Relaxation r = lasserre_relaxation(univariate(f), 2);
  const SdpSolution s = sdp_solve(r.sdp);
  ASSERT_EQ(s.status, SdpStatus::kOptimal);
  EXPECT_NEAR(relaxation_bound(r, s), 0.0, 1e-6);
  EXPECT_LT(certificate_residual(r, s, relaxation_bound(r, s)), 1e-6);
  // Two global minimizers: no rank-one moment matrix.
  EXPECT_FALSE(extract_candidate(r, s).point.has_value());
  EXPECT_THROW(lasserre_relaxation(univariate(f), 1), ConfigError);
}

TEST(Relaxation, LinearProgramOnInterval) {
  SemialgebraicProgram p = univariate(Polynomial::variable(1, 0));
  p.inequalities = {Polynomial::variable(1, 0), Polynomial::constant(1, 1.0) - Polynomial::variable(1, 0)};
  p.inequality_labels = {"lower", "upper"};
  const Relaxation r = lasserre_relaxation(p, 1);
  const SdpSolution s = sdp_solve(r.sdp);
  ASSERT_EQ(s.status, SdpStatus::kOptimal);
  EXPECT_NEAR(relaxation_bound(r, s), 0.0, 1e-6);
}

TEST(Relaxation, LinearObjectiveOnDiskRecoversVertex) {
  // min x + 2y over the unit disk: the LP-style oracle gives -(1, 2)/sqrt(5).
  const int n = 2;
  const Polynomial x = Polynomial::variable(n, 0), y = Polynomial::variable(n, 1);
  SemialgebraicProgram p;
  p.num_vars = n;
  p.objective = x + 2.0 * y;
  p.inequalities = {Polynomial::constant(n, 1.0) - x * x - y * y};
  p.inequality_labels = {"disk"};
  const SosResult res = solve_sos(p, SosConfig{});
  EXPECT_NEAR(res.lower_bound, -std::sqrt(5.0), 1e-6);
  ASSERT_TRUE(res.extracted_candidate.has_value());
  EXPECT_NEAR((*res.extracted_candidate)(0), -1.0 / std::sqrt(5.0), 1e-5);
  EXPECT_NEAR((*res.extracted_candidate)(1), -2.0 / std::sqrt(5.0), 1e-5);
}

TEST(Relaxation, MotzkinOnBallHasNoCandidate) {
  const int n = 2;
  const Polynomial x = Polynomial::variable(n, 0), y = Polynomial::variable(n, 1);
  SemialgebraicProgram p;
  p.num_vars = n;
  p.objective = x.pow(4) * y.pow(2) + x.pow(2) * y.pow(4) - 3.0 * x.pow(2) * y.pow(2) + Polynomial::constant(n, 1.0);
  p.inequalities = {Polynomial::constant(n, 3.0) - x * x - y * y};
  p.inequality_labels = {"ball"};
  const Relaxation r = lasserre_relaxation(p, 3);
  const SdpSolution s = sdp_solve(r.sdp);
  const Extraction ex = extract_candidate(r, s);
  EXPECT_FALSE(ex.point.has_value());
  EXPECT_LT(ex.ratio, 1e4);
  // Whatever the order-3 bound is, it cannot exceed the true minimum 0.
  if (s.status == SdpStatus::kOptimal) EXPECT_LE(relaxation_bound(r, s), 1e-6);
}

TEST(Relaxation, ExactQubitStateIsTight) {
  Rng rng(5);
  const CMatrix rho = mixed_qubit(rng);
  const SemialgebraicProgram p = build_sos_program(SosTask::kQstI, qst_model(rho, rho));
  const Relaxation r = lasserre_relaxation(p);
  EXPECT_EQ(r.order, 2);
  const SdpSolution s = sdp_solve(r.sdp);
  ASSERT_EQ(s.status, SdpStatus::kOptimal);
  const double gamma = relaxation_bound(r, s);
  EXPECT_NEAR(gamma, 0.0, 1e-6);
  EXPECT_LT(certificate_residual(r, s, gamma), 1e-6);
  const Extraction ex = extract_candidate(r, s);
  ASSERT_TRUE(ex.point.has_value());
  EXPECT_GT(ex.ratio, 1e4);
  EXPECT_LT((*ex.point - encode(p, {{rho}})).norm(), 1e-5);
  double xz = 0.0;
  for (std::size_t j = 0; j < s.x.size(); ++j) xz += (s.x[j] * s.z[j]).squaredNorm();
  EXPECT_LT(std::sqrt(xz), 1e-6);
}

TEST(Relaxation, OrderMonotonicityAndSoundness) {
  Rng rng(6);
  const CMatrix rho = mixed_qubit(rng);
  const LinearModel m = noisy_qst_model(rho, rho, 2000, rng);
  const SemialgebraicProgram p = build_sos_program(SosTask::kQstI, m);
  const Relaxation r2 = lasserre_relaxation(p, 2);
  const Relaxation r3 = lasserre_relaxation(p, 3);
  const SdpSolution s2 = sdp_solve(r2.sdp), s3 = sdp_solve(r3.sdp);
  ASSERT_EQ(s2.status, SdpStatus::kOptimal);
  ASSERT_EQ(s3.status, SdpStatus::kOptimal);
  const double g2 = relaxation_bound(r2, s2), g3 = relaxation_bound(r3, s3);
  EXPECT_GE(g3, g2 - 1e-8);
  EXPECT_LT(certificate_residual(r3, s3, g3), 1e-6);
  // Any feasible point costs at least gamma.
  for (int k = 0; k < 20; ++k) {
    const RVector x = encode(p, {{testing::random_density(2, rng)}});
    EXPECT_GE(p.cost(x), g3 - 1e-6);
  }
  const auto start = closed_form_start(SosTask::kQstI, m, p);
  ASSERT_TRUE(start.has_value());
  EXPECT_GE(p.cost(*start), g2 - 1e-6);
}

TEST(Polish, Examples) {
  Rng rng(7);
  const CVector psi = random_pure_vector(2, rng);
  const CMatrix pure = psi * psi.adjoint();
  const SemialgebraicProgram p = build_sos_program(SosTask::kQstI, qst_model(pure, pure));
  const RVector truth = encode(p, {{pure}});
  PolishResult at_truth = local_polish(p, truth);
  EXPECT_LT(at_truth.cost, 1e-12);
  EXPECT_LT((at_truth.point - truth).norm(), 1e-12);

  const PolishResult from_mixed = local_polish(p, default_point(p));
  EXPECT_LT(from_mixed.cost, 1e-8);
  EXPECT_LT(from_mixed.violation, 1e-12);

  const CMatrix rho = mixed_qubit(rng);
  const LinearModel noisy = noisy_qst_model(rho, rho, 500, rng);
  const SemialgebraicProgram q = build_sos_program(SosTask::kQstI, noisy);
  const auto start = closed_form_start(SosTask::kQstI, noisy, q);
  ASSERT_TRUE(start.has_value());
  const PolishResult polished = local_polish(q, *start);
  EXPECT_LE(polished.cost, q.cost(*start) + 1e-15);

  RVector far = RVector::Constant(3, 10.0);
  EXPECT_THROW(local_polish(q, far), InfeasibleStartError);
}

TEST(SolveSos, ExactQubitStateEndToEnd) {
  Rng rng(8);
  const CMatrix rho = mixed_qubit(rng);
  const SosResult r = solve_sos(SosTask::kQstI, qst_model(rho, rho));
  ASSERT_TRUE(r.candidate.has_value());
  ASSERT_TRUE(r.gap.has_value());
  EXPECT_LT(std::abs(*r.gap), 1e-6);
  EXPECT_GE(*r.candidate_cost, r.lower_bound - 1e-6);
  ASSERT_EQ(r.estimate.size(), 1u);
  EXPECT_LT((r.estimate[0][0] - rho).norm(), 1e-4);
  EXPECT_EQ(r.status, SdpStatus::kOptimal);
}

TEST(SolveSos, DistinctStatesAndDetectors) {
  Rng rng(9);
  const CMatrix r1 = mixed_qubit(rng), r2 = mixed_qubit(rng);
  const SosResult st = solve_sos(SosTask::kQstD, qst_model(r1, r2));
  ASSERT_EQ(st.estimate.size(), 2u);
  EXPECT_LT((st.estimate[0][0] - r1).norm(), 1e-4);
  EXPECT_LT((st.estimate[1][0] - r2).norm(), 1e-4);
  EXPECT_LT(std::abs(*st.gap), 1e-6);

  const HermitianBasis b = gell_mann_basis(2);
  const auto probes = pure_probes(4, 20, rng);
  const auto elems = testing::random_povm_elements(2, 3, rng);
  LinearModel m = build_theta(probes, b, b, 3, 3);
  attach_probabilities(m, setting_probabilities(probes, Povm(elems), Povm(elems)));
  const SosResult dt = solve_sos(SosTask::kQdtI, m);
  ASSERT_EQ(dt.estimate.size(), 1u);
  double err = 0.0;
  for (int l = 0; l < 3; ++l) err += (dt.estimate[0][static_cast<std::size_t>(l)] - elems[static_cast<std::size_t>(l)]).squaredNorm();
  EXPECT_LT(std::sqrt(err), 1e-4);
  EXPECT_LT(std::abs(*dt.gap), 1e-6);
}

TEST(SolveSos, BitPhaseFlipFromOneProbe) {
  Rng rng(10);
  const auto probes = pure_probes(4, 1, rng);
  LinearModel m = build_collective_process_model(probes, mub_scheme(), 2, 2);
  const CMatrix x = bit_phase_flip(0.8).matrix();
  attach_probabilities(m, setting_probabilities(m, probes, mub_scheme(), joint_process(x, 2, x, 2)));
  SosConfig cfg;
  cfg.program.families = {bit_phase_flip_family()};
  const SosResult r = solve_sos(SosTask::kQptI, m, cfg);
  ASSERT_TRUE(r.candidate.has_value());
  EXPECT_NEAR((*r.candidate)(0), 0.8, 1e-4);
  EXPECT_LT(std::abs(*r.gap), 1e-6);
}

TEST(SosIo, JsonExport) {
  Rng rng(11);
  const CMatrix rho = mixed_qubit(rng);
  const SemialgebraicProgram p = build_sos_program(SosTask::kQstI, qst_model(rho, rho));
  const nlohmann::json j = to_json(p);
  EXPECT_EQ(j["num_vars"], 3);
  EXPECT_EQ(j["inequalities"].size(), 1u);
  EXPECT_EQ(j["inequalities"][0]["label"], "ball:rho");
  const Polynomial back = polynomial_from_json(j["objective"], 3);
  RVector v(3);
  v << 0.1, -0.2, 0.3;
  EXPECT_DOUBLE_EQ(back.evaluate(v), p.objective.evaluate(v));
  EXPECT_THROW(polynomial_from_json(nlohmann::json{{"terms", 3}}, 3), SchemaError);

  const SosResult r = solve_sos(SosTask::kQstI, qst_model(rho, rho));
  const nlohmann::json jr = to_json(r);
  EXPECT_EQ(jr["status"], "optimal");
  EXPECT_EQ(jr["candidate"].size(), 3u);
  EXPECT_TRUE(jr.contains("gap"));
  EXPECT_EQ(sos_task_from_string("qdt_i"), SosTask::kQdtI);
  EXPECT_THROW(sos_task_from_string("qxt"), ConfigError);
}

}  // namespace
}  // namespace ctomo
