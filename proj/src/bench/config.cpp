#include <array>
#include <cmath>
#include <string>

#include "ctomo/bench.hpp"
#include "ctomo/quantum_io.hpp"

namespace ctomo {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<BenchTask, const char*>, 6> kTaskNames{{
    {BenchTask::kDQst, "d-qst"},
    {BenchTask::kIQst, "i-qst"},
    {BenchTask::kDQdt, "d-qdt"},
    {BenchTask::kIQdt, "i-qdt"},
    {BenchTask::kDQpt, "d-qpt"},
    {BenchTask::kIQpt, "i-qpt"},
}};

constexpr std::array<std::pair<BenchEstimator, const char*>, 5> kEstimatorNames{{
    {BenchEstimator::kCf, "cf"},
    {BenchEstimator::kCfReg, "cf-reg"},
    {BenchEstimator::kSos, "sos"},
    {BenchEstimator::kPurityCf, "purity-cf"},
    {BenchEstimator::kMarginal, "marginal"},
}};

bool identical(BenchTask t) {
  return t == BenchTask::kIQst || t == BenchTask::kIQdt || t == BenchTask::kIQpt;
}

std::vector<double> real_list(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string("truth: \"") + what + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw SchemaError(std::string("truth: \"") + what + "\" must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> real_lists(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string("truth: \"") + what + "\" must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& v : j) out.push_back(real_list(v, what));
  return out;
}

}  // namespace

std::string to_string(BenchTask t) {
  for (const auto& [k, name] : kTaskNames)
    if (k == t) return name;
  return "unknown";
}

std::string to_string(BenchEstimator e) {
  for (const auto& [k, name] : kEstimatorNames)
    if (k == e) return name;
  return "unknown";
}

BenchTask bench_task_from_string(const std::string& s) {
  for (const auto& [k, name] : kTaskNames)
    if (s == name) return k;
  throw ConfigError("unknown task '" + s + "' (expected d-qst, i-qst, d-qdt, i-qdt, d-qpt or i-qpt)");
}

BenchEstimator bench_estimator_from_string(const std::string& s) {
  for (const auto& [k, name] : kEstimatorNames)
    if (s == name) return k;
  throw ConfigError("unknown estimator '" + s + "' (expected cf, cf-reg, sos, purity-cf or marginal)");
}

TaskKind task_kind(BenchTask t) {
  switch (t) {
    case BenchTask::kDQst:
    case BenchTask::kIQst:
      return TaskKind::kQst;
    case BenchTask::kDQdt:
    case BenchTask::kIQdt:
      return TaskKind::kQdt;
    default:
      return TaskKind::kQpt;
  }
}

CopyMode copy_mode(BenchTask t) { return identical(t) ? CopyMode::kIdentical : CopyMode::kDistinct; }

SosTask sos_task(BenchTask t) {
  switch (t) {
    case BenchTask::kDQst: return SosTask::kQstD;
    case BenchTask::kIQst: return SosTask::kQstI;
    case BenchTask::kDQdt: return SosTask::kQdtD;
    case BenchTask::kIQdt: return SosTask::kQdtI;
    case BenchTask::kDQpt: return SosTask::kQptD;
    default: return SosTask::kQptI;
  }
}

TruthSpec truth_preset(const std::string& name, BenchTask task) {
  TruthSpec t;
  t.name = name;
  const bool same = identical(task);
  switch (task_kind(task)) {
    case TaskKind::kQst:
      if (name == "default") {
        t.spectra = same ? std::vector<std::vector<double>>{{0.9, 0.1}}
                         : std::vector<std::vector<double>>{{0.9, 0.1}, {0.8, 0.2}};
      } else if (name == "pure") {
        t.spectra.assign(same ? 1 : 2, {1.0, 0.0});
      } else if (name == "purity-s1") {
        if (!same) throw ConfigError("truth preset 'purity-s1' applies to i-qst");
        const double r = 1.0 / std::sqrt(2.0);
        t.states.push_back(0.5 * (CMatrix::Identity(2, 2) + r * pauli_x() + r * pauli_z()));
      } else {
        throw ConfigError("unknown truth preset '" + name + "' for " + to_string(task));
      }
      break;
    case TaskKind::kQdt:
      if (name != "default" && name != "incomplete") {
        throw ConfigError("unknown truth preset '" + name + "' for " + to_string(task));
      }
      t.detector = {{0.4, 0.1}, {0.5, 0.1}};
      t.probes = name == "incomplete" ? 4 : 20;
      break;
    case TaskKind::kQpt:
      if (name != "default") throw ConfigError("unknown truth preset '" + name + "' for " + to_string(task));
      t.flip = same ? std::vector<double>{0.8} : std::vector<double>{0.8, 0.7};
      t.probes = same ? 1 : 16;
      break;
  }
  return t;
}

TruthSpec truth_from_json(const json& j, BenchTask task) {
  if (!j.is_object()) throw SchemaError("truth: expected a JSON object");
  const std::string base = j.value("preset", std::string("default"));
  TruthSpec t = truth_preset(base, task);
  t.name = j.value("name", base);
  if (j.contains("spectra")) {
    t.spectra = real_lists(j["spectra"], "spectra");
    t.states.clear();
  }
  if (j.contains("states")) {
    if (!j["states"].is_array()) throw SchemaError("truth: \"states\" must be an array of matrices");
    t.states.clear();
    for (const auto& m : j["states"]) t.states.push_back(matrix_from_json(m));
  }
  if (j.contains("detector")) t.detector = real_lists(j["detector"], "detector");
  if (j.contains("flip")) t.flip = real_list(j["flip"], "flip");
  if (j.contains("probes")) {
    if (!j["probes"].is_number_integer()) throw SchemaError("truth: \"probes\" must be an integer");
    t.probes = j["probes"].get<int>();
  }
  if (j.contains("probe_draws")) {
    if (!j["probe_draws"].is_number_integer()) throw SchemaError("truth: \"probe_draws\" must be an integer");
    t.probe_draws = j["probe_draws"].get<int>();
  }
  return t;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1, got " + std::to_string(trials));
  if (copies_grid.empty()) throw ConfigError("copies grid is empty");
  for (std::size_t i = 0; i < copies_grid.size(); ++i) {
    if (copies_grid[i] <= 0) throw ConfigError("copies must be positive");
    if (i > 0 && copies_grid[i] <= copies_grid[i - 1]) throw ConfigError("copies grid must be strictly increasing");
  }
  if (order < 0) throw ConfigError("relaxation order must be nonnegative");
  if (!(reg_scale >= 0.0)) throw ConfigError("regularization scale must be nonnegative");
  if (threads < 0) throw ConfigError("threads must be nonnegative");

  const TaskKind kind = task_kind(task);
  const bool known = measurement == "mub" || measurement == "sic" || measurement == "collective2" ||
                     measurement == "collective3" || measurement == "custom";
  if (!known) throw ConfigError("unknown measurement '" + measurement + "'");
  if (measurement == "custom" && custom_path.empty()) throw ConfigError("measurement 'custom' needs a scheme file");
  if (kind == TaskKind::kQpt && measurement != "mub" && measurement != "sic") {
    throw ConfigError("process tomography measures outputs with mub or sic, not " + measurement);
  }
  if (kind == TaskKind::kQdt && measurement != "mub") {
    throw ConfigError("detector tomography uses random probes; measurement must be left at mub");
  }
  if (estimator == BenchEstimator::kPurityCf && (task != BenchTask::kIQst || measurement != "collective2")) {
    throw ConfigError("purity-cf needs task i-qst with measurement collective2");
  }
  if (estimator == BenchEstimator::kMarginal && kind != TaskKind::kQst) {
    throw ConfigError("marginal factorization applies to state tomography");
  }
  if (truth.probe_draws < 1) throw ConfigError("truth: probe_draws must be at least 1");
  if ((kind == TaskKind::kQdt || kind == TaskKind::kQpt) && truth.probes < 1) {
    throw ConfigError("truth needs at least one probe state");
  }
  if (kind == TaskKind::kQpt && truth.flip.size() != (identical(task) ? 1u : 2u)) {
    throw ConfigError("truth needs one flip probability per unknown channel");
  }
}

MeasurementScheme scheme_from_json(const json& j) {
  if (!j.is_object() || !j.contains("settings") || !j["settings"].is_array() || j["settings"].empty()) {
    throw SchemaError("scheme: expected an object with a nonempty \"settings\" array");
  }
  MeasurementScheme s;
  s.name = j.value("name", std::string("custom"));
  s.copies_per_shot = j.value("copies_per_shot", 1);
  if (s.copies_per_shot < 1) throw SchemaError("scheme: copies_per_shot must be positive");
  for (const auto& p : j["settings"]) s.settings.push_back(povm_from_json(p));
  for (std::size_t i = 0; i < s.settings.size(); ++i) {
    if (s.settings[i].dim() != s.settings.front().dim()) throw SchemaError("scheme: settings differ in dimension");
    s.setting_ids.push_back(s.name + "-" + std::to_string(i));
  }
  if (j.contains("setting_ids")) {
    s.setting_ids = j["setting_ids"].get<std::vector<std::string>>();
    if (s.setting_ids.size() != s.settings.size()) throw SchemaError("scheme: one setting id per setting");
  }
  return s;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, long copies, int trial) {
  return mix_seed(mix_seed(mix_seed(seed) ^ static_cast<std::uint64_t>(copies)) ^ static_cast<std::uint64_t>(trial));
}

}  // namespace ctomo
