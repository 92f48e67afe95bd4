// Acceptance checks 1-8. Usage: acceptance [criterion...]; prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ctomo/bench.hpp"

namespace {

using namespace ctomo;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + what;
  }
}

ExperimentConfig experiment(BenchTask task, BenchEstimator est, std::vector<long> grid, int trials,
                            const std::string& preset = "default") {
  ExperimentConfig c;
  c.task = task;
  c.estimator = est;
  c.copies_grid = std::move(grid);
  c.trials = trials;
  c.seed = 20240601;
  c.truth = truth_preset(preset, task);
  return c;
}

CMatrix random_complex(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

CMatrix random_hermitian(Index d, Rng& rng) {
  const CMatrix a = random_complex(d, d, rng);
  return (a + a.adjoint()) / 2.0;
}

std::vector<double> random_spectrum(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(static_cast<std::size_t>(d));
  double total = 0.0;
  for (auto& x : s) total += (x = u(rng));
  for (auto& x : s) x /= total;
  return s;
}

std::vector<CMatrix> random_povm(int d, int outcomes, Rng& rng) {
  std::vector<CMatrix> raw;
  CMatrix sum = CMatrix::Zero(d, d);
  for (int l = 0; l < outcomes; ++l) {
    const CMatrix a = random_complex(d, d, rng);
    raw.push_back(a * a.adjoint());
    sum += raw.back();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sum);
  const CMatrix s = es.operatorInverseSqrt();
  CMatrix rest = CMatrix::Identity(d, d);
  for (int l = 0; l + 1 < outcomes; ++l) {
    raw[static_cast<std::size_t>(l)] = hermitian_part(s * raw[static_cast<std::size_t>(l)] * s);
    rest -= raw[static_cast<std::size_t>(l)];
  }
  raw.back() = hermitian_part(rest);
  return raw;
}

// Brute-force Euclidean projection onto the simplex: try every support.
RVector simplex_oracle(const RVector& v) {
  const Index n = v.size();
  RVector best;
  double best_dist = 1e300;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int size = 0;
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum += v(i);
        ++size;
      }
    const double shift = (sum - 1.0) / size;
    RVector x = RVector::Zero(n);
    bool ok = true;
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        x(i) = v(i) - shift;
        ok = ok && x(i) >= 0.0;
      }
    if (ok && (x - v).norm() < best_dist) {
      best_dist = (x - v).norm();
      best = x;
    }
  }
  return best;
}

Outcome slope_check(const ExperimentConfig& cfg, const std::vector<std::size_t>& objects) {
  Outcome o;
  const auto rows = run_experiment(cfg);
  int failures = 0;
  for (const auto& r : rows) failures += r.failure.has_value();
  require(o, failures == 0, std::to_string(failures) + " failed trials");
  auto judge = [&](const SlopeFit& f, const std::string& label) {
    o.detail += (o.detail.empty() ? "" : ", ") + label + " slope " + fmt(f.slope) + " +- " + fmt(f.std_error);
    require(o, f.slope >= -1.15 && f.slope <= -0.85, label + " slope outside [-1.15, -0.85]");
  };
  if (objects.empty()) {
    judge(fit_slope(rows), "total");
  } else {
    for (std::size_t k : objects) judge(fit_slope(rows, k), "object " + std::to_string(k + 1));
  }
  return o;
}

Outcome noiseless_exactness() {
  Outcome o;
  double worst = 0.0;
  for (BenchTask task : {BenchTask::kDQst, BenchTask::kIQst, BenchTask::kDQdt, BenchTask::kIQdt, BenchTask::kDQpt,
                         BenchTask::kIQpt}) {
    ExperimentConfig c = experiment(task, BenchEstimator::kCf, {1000}, 1);
    c.noiseless = true;
    if (task == BenchTask::kIQpt) c.truth.probes = 16;  // weakly complete design
    const Scenario s(c);
    LinearModel m = s.model();
    attach_probabilities(m, s.probabilities());
    const MseRow row = s.evaluate(m, 1000);
    for (double e : row.object_mse) {
      worst = std::max(worst, std::sqrt(e));
      require(o, std::sqrt(e) < 1e-8, to_string(task) + " Frobenius error " + fmt(std::sqrt(e)));
    }
  }
  o.detail = "worst Frobenius error " + fmt(worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome weakly_incomplete() {
  Outcome o;
  const ExperimentConfig reg =
      experiment(BenchTask::kIQdt, BenchEstimator::kCfReg, {100000, 1000000}, 100, "incomplete");
  const auto groups = summarize(run_experiment(reg));
  const double m5 = groups[0].mean, m6 = groups[1].mean;
  const double change = std::abs(m6 - m5) / m5;
  const ExperimentConfig sos = experiment(BenchTask::kIQdt, BenchEstimator::kSos, {1000000}, 100, "incomplete");
  const auto sg = summarize(run_experiment(sos));
  o.detail = "cf-reg MSE " + fmt(m5) + " (1e5) -> " + fmt(m6) + " (1e6), change " + fmt(100 * change) +
             "%; sos MSE " + fmt(sg[0].mean) + " at 1e6 (" + std::to_string(sg[0].failures) + " failures)";
  require(o, change < 0.30, "closed-form MSE is not on a plateau");
  require(o, sg[0].failures == 0, "sos trials failed");
  require(o, 3.0 * sg[0].mean <= m6, "sos is not 3x below the closed-form plateau");
  return o;
}

struct SosInstance {
  BenchTask task;
  bool exact;
  std::string preset;
  int probes;
  int outcomes;  // QDT
};

Outcome sos_soundness() {
  Outcome o;
  const std::vector<SosInstance> kinds = {
      {BenchTask::kIQst, false, "default", 0, 0}, {BenchTask::kDQst, false, "default", 0, 0},
      {BenchTask::kIQst, true, "default", 0, 0},  {BenchTask::kDQst, true, "default", 0, 0},
      {BenchTask::kIQdt, false, "default", 20, 3}, {BenchTask::kIQdt, true, "default", 20, 3},
      {BenchTask::kDQdt, true, "default", 20, 2},  {BenchTask::kIQpt, false, "default", 1, 0},
      {BenchTask::kDQpt, true, "default", 16, 0},  {BenchTask::kIQpt, true, "default", 1, 0},
  };
  int instances = 0, exact = 0, checked = 0, skipped = 0;
  double worst_cert = 0.0, worst_gap = 0.0, worst_recovery = 0.0, worst_slack = -1e300;
  for (int rep = 0; rep < 5; ++rep) {
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const SosInstance& in = kinds[k];
      ExperimentConfig c = experiment(in.task, BenchEstimator::kSos, {20000}, 1, in.preset);
      c.seed = 1000 + 37 * static_cast<std::uint64_t>(rep) + k;
      if (in.probes > 0) c.truth.probes = in.probes;
      if (in.outcomes == 2) c.truth.detector = {{0.6, 0.2}};
      const Scenario s(c);
      LinearModel model = s.model();
      Rng rng(trial_seed(c.seed, 20000, 0));
      if (in.exact) {
        attach_probabilities(model, s.probabilities());
      } else {
        attach_counts(model, s.sample(20000, rng));
      }
      const SosTask task = sos_task(in.task);
      const TaskKind kind = task_kind(in.task);
      SosConfig cfg;
      if (kind == TaskKind::kQpt) cfg.program.families.assign(s.truth_processes().size(), bit_phase_flip_family());
      const SemialgebraicProgram p = build_sos_program(task, model, cfg.program);
      const SosResult r = solve_sos(p, cfg, closed_form_start(task, model, p));
      ++instances;
      const std::string tag = to_string(in.task) + (in.exact ? " exact" : " noisy") + " #" + std::to_string(rep);
      require(o, r.status == SdpStatus::kOptimal, tag + ": sdp " + to_string(r.status));
      const double cert = r.certificate_residual / p.objective.coefficient_norm();
      worst_cert = std::max(worst_cert, cert);
      require(o, cert < 1e-6, tag + ": certificate residual " + fmt(cert) + " relative to the objective");

      // Feasible points: truth, closed form, candidate, random physical objects.
      BlockValues truth;
      switch (kind) {
        case TaskKind::kQst:
          for (const auto& st : s.truth_states()) truth.push_back({st});
          break;
        case TaskKind::kQdt:
          for (const auto& pv : s.truth_povms()) truth.push_back(pv);
          break;
        case TaskKind::kQpt:
          for (const auto& x : s.truth_processes()) truth.push_back({x});
          break;
      }
      std::vector<RVector> points = {encode(p, truth)};
      if (auto cf = closed_form_start(task, model, p)) points.push_back(*cf);
      if (r.candidate) points.push_back(*r.candidate);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int t = 0; t < 20; ++t) {
        BlockValues v;
        for (std::size_t b = 0; b < truth.size(); ++b) {
          switch (kind) {
            case TaskKind::kQst: v.push_back({random_state(2, random_spectrum(2, rng), rng).matrix()}); break;
            case TaskKind::kQdt: v.push_back(random_povm(2, static_cast<int>(truth[b].size()), rng)); break;
            case TaskKind::kQpt: v.push_back({bit_phase_flip(unit(rng)).matrix()}); break;
          }
        }
        points.push_back(encode(p, v));
      }
      for (const RVector& x : points) {
        if (p.violation(x) > 1e-8) {
          ++skipped;
          continue;
        }
        ++checked;
        const double slack = r.lower_bound - p.cost(x);
        worst_slack = std::max(worst_slack, slack);
        require(o, slack <= 1e-6, tag + ": feasible cost below the bound by " + fmt(slack));
      }

      if (in.exact) {
        ++exact;
        require(o, r.gap.has_value(), tag + ": no candidate");
        if (!r.gap) continue;
        worst_gap = std::max(worst_gap, std::abs(*r.gap));
        require(o, std::abs(*r.gap) < 1e-6, tag + ": gap " + fmt(*r.gap));
        double err = 0.0;
        for (std::size_t b = 0; b < truth.size(); ++b)
          for (std::size_t e = 0; e < truth[b].size(); ++e) err += (r.estimate[b][e] - truth[b][e]).squaredNorm();
        worst_recovery = std::max(worst_recovery, std::sqrt(err));
        require(o, std::sqrt(err) < 1e-4, tag + ": recovery error " + fmt(std::sqrt(err)));
      }
    }
  }
  const std::string summary = std::to_string(instances) + " instances (" + std::to_string(exact) +
                               " exact), " + std::to_string(checked) + " feasible points (" + std::to_string(skipped) +
                              " infeasible skipped): max relative certificate residual " + fmt(worst_cert) + ", max bound slack " +
                              fmt(worst_slack) + ", max |gap| " + fmt(worst_gap) + ", max recovery error " +
                              fmt(worst_recovery);
  o.detail = summary + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome purity_vs_bound() {
  Outcome o;
  ExperimentConfig c = experiment(BenchTask::kIQst, BenchEstimator::kPurityCf, {1024, 2048}, 500, "purity-s1");
  c.measurement = "collective2";
  const Scenario s(c);
  double worst_identity = 0.0;
  for (long n : c.copies_grid) {
    double total = 0.0;
    for (int t = 0; t < c.trials; ++t) {
      Rng rng(trial_seed(c.seed, n, t));
      LinearModel m = s.model();
      attach_counts(m, s.sample(n, rng));
      const PurityEstimate est = estimate_qubit_with_purity(m.observation.real());
      if (!est.clamped) {
        const double gap = std::abs(purity(est.state) - (1.0 - 2.0 * m.observation(4).real()));
        worst_identity = std::max(worst_identity, gap);
      }
      total += (est.state.matrix() - s.truth_states()[0]).squaredNorm();
    }
    const double mean = total / c.trials;
    const double bound = collective_bound(1.0, n);
    o.detail += "N=" + std::to_string(n) + ": mean MSE " + fmt(mean) + " vs 2x bound " + fmt(2 * bound) + "; ";
    require(o, mean <= 2.0 * bound, "mean MSE above twice the collective bound at N=" + std::to_string(n));
  }
  o.detail += "max |Tr(rho^2) - (1 - 2 p5)| " + fmt(worst_identity);
  require(o, worst_identity <= 4 * std::numeric_limits<double>::epsilon(), "purity identity off by " + fmt(worst_identity));
  return o;
}

std::vector<Polynomial> constant_coords(const RVector& v) {
  std::vector<Polynomial> out;
  for (Index i = 0; i < v.size(); ++i) out.push_back(Polynomial::constant(1, v(i)));
  return out;
}

Outcome oracle_suites() {
  Outcome o;
  Rng rng(8080);
  std::uniform_int_distribution<int> dim(1, 4);
  const int n = 1000;
  int fails = 0;

  for (int t = 0; t < n; ++t) {  // rearrangement isometry and product structure
    const int d1 = dim(rng) + 1, d2 = dim(rng) + 1;
    const CMatrix m = random_complex(d1 * d2, d1 * d2, rng);
    const CMatrix a = random_complex(d1, d1, rng), b = random_complex(d2, d2, rng);
    const bool ok = std::abs(kron_rearrange(m, d1, d2).norm() - m.norm()) <= 1e-12 * m.norm() &&
                    (kron_rearrange(kron(a, b), d1, d2) - vec(a) * vec(b).transpose()).norm() <= 1e-12 * a.norm() * b.norm();
    fails += !ok;
  }
  require(o, fails == 0, std::to_string(fails) + " rearrangement failures");
  fails = 0;
  for (int t = 0; t < n; ++t) {  // commutation matrix transposes and is a permutation
    const int q = dim(rng), m = dim(rng);
    const CMatrix k = commutation_matrix(q, m);
    const CMatrix x = random_complex(q, m, rng);
    bool ok = (k * vec(x) - vec(x.transpose())).norm() == 0.0;
    for (Index i = 0; i < k.rows(); ++i) ok = ok && k.row(i).cwiseAbs().sum() == 1.0 && k.col(i).cwiseAbs().sum() == 1.0;
    fails += !ok;
  }
  require(o, fails == 0, std::to_string(fails) + " commutation failures");
  fails = 0;
  for (int t = 0; t < n; ++t) {  // vec(A (x) B) = (I (x) K (x) I)(vec A (x) vec B)
    const CMatrix a = random_complex(dim(rng), dim(rng), rng), b = random_complex(dim(rng), dim(rng), rng);
    fails += (vec_kron_identity(a, b) - vec(kron(a, b))).norm() > 1e-12 * a.norm() * b.norm();
  }
  require(o, fails == 0, std::to_string(fails) + " vec-kron identity failures");
  fails = 0;
  for (int t = 0; t < n; ++t) {  // Weyl
    const int d = dim(rng) + 1;
    const CMatrix x = random_hermitian(d, rng), y = random_hermitian(d, rng);
    const double shift = (hermitian_eig(x).values - hermitian_eig(y).values).cwiseAbs().maxCoeff();
    fails += shift > (x - y).norm() + 1e-12;
  }
  require(o, fails == 0, std::to_string(fails) + " Weyl failures");
  fails = 0;
  for (int t = 0; t < n; ++t) {  // partial trace norm bound
    const int d1 = dim(rng), d2 = dim(rng);
    const CMatrix x = random_complex(d1 * d2, d1 * d2, rng);
    const double lhs = partial_trace(x, d1, d2, Subsystem::kFirst).norm();
    fails += lhs > std::sqrt(static_cast<double>(d1)) * x.norm() + 1e-12;
  }
  require(o, fails == 0, std::to_string(fails) + " partial-trace bound failures");

  std::uniform_real_distribution<double> radius(0.0, 1.5);
  for (int d : {2, 3}) {  // Kimura signs against eigenvalues
    const HermitianBasis basis = gell_mann_basis(d);
    int disagree = 0, psd = 0, total = 0;
    while (total < n) {
      CMatrix h = random_hermitian(d, rng);
      h -= (h.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
      const CMatrix m = CMatrix::Identity(d, d) / static_cast<double>(d) + radius(rng) * h / h.norm();
      const double lmin = min_eigenvalue(m);
      if (std::abs(lmin) < 1e-9) continue;
      bool nonneg = true;
      for (const auto& k : kimura_constraints(constant_coords(parameterize(m, basis).values), basis))
        nonneg = nonneg && k.constant_term() >= 0.0;
      disagree += nonneg != (lmin > 0.0);
      psd += lmin > 0.0;
      ++total;
    }
    require(o, disagree == 0, std::to_string(disagree) + " Kimura sign disagreements for d=" + std::to_string(d));
    require(o, psd > 100 && psd < total - 100, "Kimura sample not mixed for d=" + std::to_string(d));
  }

  fails = 0;
  for (int t = 0; t < n; ++t) {  // projections: fixed on physical inputs, idempotent
    const int d = 2 + t % 3;
    const CMatrix rho = random_state(d, random_spectrum(d, rng), rng).matrix();
    bool ok = (project_state(rho).matrix() - rho).norm() <= 1e-10;
    const CMatrix once = project_state(random_hermitian(d, rng)).matrix();
    ok = ok && (project_state(once).matrix() - once).norm() <= 1e-10;
    const std::vector<CMatrix> povm = random_povm(2, 3, rng);
    const PovmProjection pp = project_povm(povm);
    for (std::size_t l = 0; l < povm.size(); ++l) ok = ok && (pp.povm[l] - povm[l]).norm() <= 1e-10;
    std::vector<CMatrix> noisy;
    for (const auto& e : povm) noisy.push_back(e + 0.2 * random_hermitian(2, rng));
    const PovmProjection p1 = project_povm(noisy);
    const PovmProjection p2 = project_povm(p1.povm.elements());
    for (std::size_t l = 0; l < povm.size(); ++l) ok = ok && (p2.povm[l] - p1.povm[l]).norm() <= 1e-10;
    const CMatrix x = bit_phase_flip(std::uniform_real_distribution<double>(0.0, 1.0)(rng)).matrix();
    ok = ok && (project_process(x, true).process.matrix() - x).norm() <= 1e-10;
    const CMatrix xp = project_process(x + 0.2 * random_hermitian(4, rng), true).process.matrix();
    ok = ok && (project_process(xp, true).process.matrix() - xp).norm() <= 1e-10;
    fails += !ok;
  }
  require(o, fails == 0, std::to_string(fails) + " projection idempotence failures");
  fails = 0;
  for (int t = 0; t < n; ++t) {  // state projection = simplex projection of the spectrum
    const int d = 3 + t % 2;
    const CMatrix h = random_hermitian(d, rng);
    const CMatrix m = h / h.trace().real();
    const HermitianEig in = hermitian_eig(hermitian_part(m));
    const RVector expected = simplex_oracle(in.values);
    const RVector got = hermitian_eig(project_state(m).matrix()).values;
    RVector sorted = expected;
    std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
    fails += (got - sorted).norm() > 1e-10;
  }
  require(o, fails == 0, std::to_string(fails) + " state projection optimality failures");
  if (o.pass) o.detail = "all suites agree on " + std::to_string(n) + " random inputs each";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "noiseless exactness", 10, noiseless_exactness},
      {2, "i-qst mub mse scaling", 120,
       [] { return slope_check(experiment(BenchTask::kIQst, BenchEstimator::kCf, {1000, 10000, 100000, 1000000}, 100), {}); }},
      {3, "i-qdt mse scaling", 300,
       [] { return slope_check(experiment(BenchTask::kIQdt, BenchEstimator::kCf, {1000, 10000, 100000, 1000000}, 100), {}); }},
      {4, "d-qpt mse scaling", 600,
       [] {
         return slope_check(experiment(BenchTask::kDQpt, BenchEstimator::kCf, {1000, 10000, 100000, 1000000}, 100), {0, 1});
       }},
      {5, "weakly incomplete i-qdt", 1800, weakly_incomplete},
      {6, "sos soundness suite", 1200, sos_soundness},
      {7, "purity estimator vs collective bound", 120, purity_vs_bound},
      {8, "oracle and invariant suites", 60, oracle_suites},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) require(o, false, "runtime " + fmt(secs) + " s over " + fmt(c.limit_seconds) + " s");
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << fmt(secs)
              << " s): " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
