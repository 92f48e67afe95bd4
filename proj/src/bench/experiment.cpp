#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "ctomo/bench.hpp"
#include "ctomo/quantum_io.hpp"

namespace ctomo {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTruthStream = 0x7472757468ULL;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

int integer_root(int value, int power) {
  const int r = static_cast<int>(std::lround(std::pow(static_cast<double>(value), 1.0 / power)));
  int check = 1;
  for (int i = 0; i < power; ++i) check *= r;
  if (check != value) {
    throw ConfigError("measurement dimension " + std::to_string(value) + " is not a " + std::to_string(power) +
                      "-fold tensor power");
  }
  return r;
}

CMatrix diagonal(const std::vector<double>& v) {
  RVector r(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Index>(i)) = v[i];
  return r.cast<Complex>().asDiagonal();
}

double squared_error(const CMatrix& a, const CMatrix& b) { return (a - b).squaredNorm(); }

double squared_error(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += squared_error(a[l], b[l]);
  return s;
}

// Least-squares error constant of a design on its identifiable subspace;
// higher rank always wins.
std::pair<long, double> design_spread(const CMatrix& design) {
  const RVector sv = Eigen::BDCSVD<CMatrix>(design).singularValues();
  long rank = 0;
  double spread = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-8 * sv(0)) {
      ++rank;
      spread += 1.0 / (sv(i) * sv(i));
    }
  }
  return {-rank, spread};
}

template <class Build>
std::vector<QuantumState> screened_probes(int count, int dim, int draws, Rng& rng, Build build) {
  std::vector<QuantumState> best;
  std::pair<long, double> best_score{1, 0.0};
  for (int k = 0; k < draws; ++k) {
    std::vector<QuantumState> probes;
    for (int m = 0; m < count; ++m) probes.push_back(QuantumState::pure(random_pure_vector(dim, rng)));
    const auto score = design_spread(build(probes).design);
    if (k == 0 || score < best_score) {
      best = std::move(probes);
      best_score = score;
    }
  }
  return best;
}

}  // namespace

Scenario::Scenario(const ExperimentConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(mix_seed(cfg_.seed ^ kTruthStream));
  const TaskKind kind = task_kind(cfg_.task);
  const bool same = copy_mode(cfg_.task) == CopyMode::kIdentical;
  const TruthSpec& truth = cfg_.truth;

  switch (kind) {
    case TaskKind::kQst: {
      if (cfg_.measurement == "mub") {
        scheme_ = mub_scheme();
      } else if (cfg_.measurement == "sic") {
        scheme_ = sic_product_scheme(2);
      } else if (cfg_.measurement == "collective2") {
        scheme_ = single_povm_scheme("collective2", collective_two_copy_povm(), 2);
      } else if (cfg_.measurement == "collective3") {
        scheme_ = single_povm_scheme("collective3", collective_three_copy_povm(), 3);
      } else {
        scheme_ = scheme_from_json(read_json_file(cfg_.custom_path));
      }
      const int factors = scheme_.copies_per_shot;
      const int d = integer_root(scheme_.dim(), factors);
      const std::size_t needed = same ? 1u : static_cast<std::size_t>(factors);
      if (!truth.states.empty()) {
        for (const auto& s : truth.states) states_.push_back(QuantumState(s).matrix());
      } else {
        for (const auto& spectrum : truth.spectra) {
          if (static_cast<int>(spectrum.size()) != d) {
            throw ConfigError("truth spectrum has " + std::to_string(spectrum.size()) + " entries for dimension " +
                              std::to_string(d));
          }
          states_.push_back(random_state(d, spectrum, rng).matrix());
        }
      }
      if (states_.size() != needed) {
        throw ConfigError("truth describes " + std::to_string(states_.size()) + " states, " + to_string(cfg_.task) +
                          " with " + cfg_.measurement + " needs " + std::to_string(needed));
      }
      CMatrix joint = states_[0];
      for (int f = 1; f < factors; ++f) joint = kron(joint, states_[same ? 0 : static_cast<std::size_t>(f)]);
      model_ = build_phi(scheme_, std::vector<HermitianBasis>(static_cast<std::size_t>(factors), gell_mann_basis(d)));
      probabilities_ = setting_probabilities(scheme_, joint);
      break;
    }
    case TaskKind::kQdt: {
      if (truth.detector.empty()) throw ConfigError("truth has no detector description");
      const int d = static_cast<int>(truth.detector.front().size());
      for (int k = 0; k < (same ? 1 : 2); ++k) {
        std::vector<CMatrix> elements;
        CMatrix rest = CMatrix::Identity(d, d);
        for (const auto& diag : truth.detector) {
          if (static_cast<int>(diag.size()) != d) throw ConfigError("detector diagonals differ in length");
          const CMatrix u = haar_random_unitary(d, rng);
          elements.push_back(u * diagonal(diag) * u.adjoint());
          rest -= elements.back();
        }
        elements.push_back(hermitian_part(rest));
        try {
          povms_.push_back(Povm(elements).elements());
        } catch (const InvalidObjectError& e) {
          throw ConfigError(std::string("truth detector is not a POVM: ") + e.what());
        }
      }
      const HermitianBasis b = gell_mann_basis(d);
      const int outcomes = static_cast<int>(povms_[0].size());
      auto build = [&](const std::vector<QuantumState>& p) { return build_theta(p, b, b, outcomes, outcomes); };
      probes_ = screened_probes(truth.probes, d * d, truth.probe_draws, rng, build);
      model_ = build(probes_);
      probabilities_ = setting_probabilities(probes_, Povm(povms_.front()), Povm(povms_.back()));
      scheme_.name = "probes";
      scheme_.copies_per_shot = 2;
      break;
    }
    case TaskKind::kQpt: {
      scheme_ = cfg_.measurement == "sic" ? sic_product_scheme(2) : mub_scheme();
      for (double p : truth.flip) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("flip probability outside [0, 1]");
        processes_.push_back(bit_phase_flip(p).matrix());
      }
      auto build = [&](const std::vector<QuantumState>& p) { return build_collective_process_model(p, scheme_, 2, 2); };
      probes_ = screened_probes(truth.probes, 4, truth.probe_draws, rng, build);
      model_ = build(probes_);
      probabilities_ = setting_probabilities(model_, probes_, scheme_,
                                             joint_process(processes_.front(), 2, processes_.back(), 2));
      break;
    }
  }
  copies_per_shot_ = scheme_.copies_per_shot;

  for (long n : cfg_.copies_grid) {
    if (n % copies_per_shot_ != 0) {
      throw ConfigError("N = " + std::to_string(n) + " is not a multiple of the " + std::to_string(copies_per_shot_) +
                        " copies consumed per shot");
    }
    if (!cfg_.noiseless && n / copies_per_shot_ < static_cast<long>(settings())) {
      throw ConfigError("N = " + std::to_string(n) + " leaves some of the " + std::to_string(settings()) +
                        " settings without shots");
    }
  }

  if (cfg_.estimator == BenchEstimator::kCf || cfg_.estimator == BenchEstimator::kMarginal) {
    const EstimatorConfig ec = estimator_config(cfg_.copies_grid.front());
    std::optional<double> fixed;
    if (ec.inversion == Inversion::kTraceConstrained) fixed = 1.0 / std::sqrt(static_cast<double>(model_.total_dim()));
    try {
      inverter_ = std::make_shared<const LinearInverter>(model_.design, ec, fixed);
    } catch (const Error&) {
      // Rank problems surface again per trial and are recorded there.
    }
  }
}

EstimatorConfig Scenario::estimator_config(long copies) const {
  EstimatorConfig ec = EstimatorConfig::defaults_for(task_kind(cfg_.task));
  // Low-N process estimates can sit far outside the physical set, where
  // Dykstra needs tens of thousands of sweeps.
  ec.projection_max_iterations = 100000;
  if (cfg_.estimator == BenchEstimator::kCfReg) {
    ec.inversion = Inversion::kRegularized;
    ec.regularization_scale = cfg_.reg_scale / static_cast<double>(copies);
  } else if (cfg_.estimator == BenchEstimator::kMarginal) {
    ec.factorization = Factorization::kMarginal;
  }
  return ec;
}

std::vector<std::string> Scenario::setting_ids() const {
  return ctomo::setting_ids(model_, task_kind(cfg_.task) == TaskKind::kQdt ? nullptr : &scheme_);
}

std::vector<CountsRecord> Scenario::sample(long copies, Rng& rng) const {
  return sample_counts(probabilities_, copies / copies_per_shot_, rng, setting_ids());
}

BenchEstimate Scenario::estimate(const LinearModel& model, long copies) const {
  const TaskKind kind = task_kind(cfg_.task);
  const CopyMode mode = copy_mode(cfg_.task);
  BenchEstimate out;

  if (cfg_.estimator == BenchEstimator::kPurityCf) {
    const RVector freq = model.observation.real();
    const PurityEstimate est = estimate_qubit_with_purity(freq);
    const CMatrix& rho = est.state.matrix();
    out.objects = {{rho}};
    out.residual = (setting_probabilities(scheme_, kron(rho, rho))[0] - freq).norm();
    out.detail = {{"state", to_json(est.state)},
                  {"target_purity", est.target_purity},
                  {"purity", purity(est.state)},
                  {"clamped", est.clamped}};
    return out;
  }
  if (cfg_.estimator == BenchEstimator::kSos) {
    SosConfig sc;
    sc.order = cfg_.order;
    if (kind == TaskKind::kQpt) sc.program.families.assign(processes_.size(), bit_phase_flip_family());
    const SosResult r = solve_sos(sos_task(cfg_.task), model, sc);
    if (!r.candidate) throw Error("sos: no feasible candidate");
    out.objects = r.estimate;
    out.residual = *r.candidate_cost;
    out.detail = to_json(r);
    return out;
  }

  const EstimatorConfig ec = estimator_config(copies);
  const LinearInverter* inv = cfg_.estimator == BenchEstimator::kCfReg ? nullptr : inverter_.get();
  TomographyResult r;
  switch (kind) {
    case TaskKind::kQst:
      r = estimate_qst(model, ec, mode, inv);
      for (const auto& s : r.states) out.objects.push_back({s.matrix()});
      break;
    case TaskKind::kQdt:
      r = estimate_qdt(model, ec, mode, inv);
      for (const auto& p : r.povms) out.objects.push_back(p.elements());
      break;
    case TaskKind::kQpt:
      r = estimate_qpt(model, ec, mode, {}, inv);
      for (const auto& x : r.processes) out.objects.push_back({x.matrix()});
      break;
  }
  out.residual = r.diagnostics.inversion_residual;
  out.detail = to_json(r);
  return out;
}

MseRow Scenario::evaluate(const LinearModel& model, long copies) const {
  MseRow row;
  row.task = cfg_.task;
  row.estimator = cfg_.estimator;
  row.measurement = cfg_.measurement;
  row.copies = copies;
  row.shots = copies / copies_per_shot_;
  const BenchEstimate est = estimate(model, copies);
  row.residual = est.residual;
  for (std::size_t b = 0; b < est.objects.size(); ++b) {
    switch (task_kind(cfg_.task)) {
      case TaskKind::kQst: row.object_mse.push_back(squared_error(est.objects[b][0], states_[b])); break;
      case TaskKind::kQdt: row.object_mse.push_back(squared_error(est.objects[b], povms_[b])); break;
      case TaskKind::kQpt: row.object_mse.push_back(squared_error(est.objects[b][0], processes_[b])); break;
    }
  }
  row.mse = 0.0;
  for (double e : row.object_mse) row.mse += e;
  return row;
}

std::optional<double> Scenario::bloch_length() const {
  if (cfg_.task != BenchTask::kIQst || states_.size() != 1 || states_[0].rows() != 2) return std::nullopt;
  const double p = (states_[0] * states_[0]).trace().real();
  return std::sqrt(std::max(0.0, 2.0 * p - 1.0));
}

json Scenario::truth_json() const {
  json j = {{"name", cfg_.truth.name}};
  json states = json::array(), povms = json::array(), processes = json::array(), probes = json::array();
  for (const auto& s : states_) states.push_back(matrix_to_json(s));
  for (const auto& p : povms_) {
    json elems = json::array();
    for (const auto& e : p) elems.push_back(matrix_to_json(e));
    povms.push_back(elems);
  }
  for (const auto& x : processes_) processes.push_back(matrix_to_json(x));
  for (const auto& p : probes_) probes.push_back(matrix_to_json(p.matrix()));
  if (!states_.empty()) j["states"] = states;
  if (!povms_.empty()) j["povms"] = povms;
  if (!processes_.empty()) {
    j["processes"] = processes;
    j["flip"] = cfg_.truth.flip;
  }
  if (!probes_.empty()) j["probes"] = probes;
  return j;
}

std::vector<MseRow> run_experiment(const ExperimentConfig& cfg) {
  const Scenario scenario(cfg);
  const std::size_t per_n = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = cfg.copies_grid.size() * per_n;
  std::vector<MseRow> rows(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) {
      const long copies = cfg.copies_grid[i / per_n];
      const int trial = static_cast<int>(i % per_n);
      try {
        Rng rng(trial_seed(cfg.seed, copies, trial));
        LinearModel model = scenario.model();
        if (cfg.noiseless) {
          attach_probabilities(model, scenario.probabilities());
        } else {
          attach_counts(model, scenario.sample(copies, rng));
        }
        const auto start = std::chrono::steady_clock::now();
        MseRow row;
        try {
          row = scenario.evaluate(model, copies);
        } catch (const Error& e) {
          row.task = cfg.task;
          row.estimator = cfg.estimator;
          row.measurement = cfg.measurement;
          row.copies = copies;
          row.shots = copies / scenario.copies_per_shot();
          row.mse = std::numeric_limits<double>::quiet_NaN();
          row.residual = std::numeric_limits<double>::quiet_NaN();
          row.failure = e.what();
        }
        if (cfg.timing) {
          row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        row.trial = trial;
        rows[i] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = total;
      }
    }
  };

  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);
  return rows;
}

}  // namespace ctomo
