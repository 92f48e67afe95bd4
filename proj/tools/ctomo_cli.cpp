// ctomo: simulate counts, estimate from counts files, run Monte Carlo benches.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ctomo/bench.hpp"

namespace {

using nlohmann::json;
using namespace ctomo;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kEstimatorFailure = 3;

struct Flags {
  std::string task = "i-qst";
  std::string estimator = "cf";
  std::string measurement = "mub";
  std::string copies = "1000";
  int trials = 100;
  std::uint64_t seed = 1;
  std::string truth = "default";
  int order = 0;
  double reg_scale = 1000.0;
  bool noiseless = false;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  bool timing = false;
  std::string counts;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--task", f.task, "d-qst, i-qst, d-qdt, i-qdt, d-qpt or i-qpt")->capture_default_str();
  app->add_option("--estimator", f.estimator, "cf, cf-reg, sos, purity-cf or marginal")->capture_default_str();
  app->add_option("--measurement", f.measurement, "mub, sic, collective2, collective3 or custom:<scheme.json>")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "experiment seed; fixes truth objects, probes and samples")->capture_default_str();
  app->add_option("--truth", f.truth, "preset name (default, pure, purity-s1, incomplete) or truth JSON path")
      ->capture_default_str();
  app->add_option("--order", f.order, "SOS relaxation order, 0 for the minimal one")->capture_default_str();
  app->add_option("--reg-scale", f.reg_scale, "cf-reg uses D = (reg_scale / N) I")->capture_default_str();
  app->add_option("--out", f.out, "output path, stdout when empty");
}

std::vector<long> parse_copies(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--copies: '" + item + "' is not an integer");
    }
  }
  return out;
}

ExperimentConfig make_config(const Flags& f) {
  ExperimentConfig c;
  c.task = bench_task_from_string(f.task);
  c.estimator = bench_estimator_from_string(f.estimator);
  c.measurement = f.measurement;
  if (f.measurement.rfind("custom:", 0) == 0) {
    c.measurement = "custom";
    c.custom_path = f.measurement.substr(7);
  }
  c.copies_grid = parse_copies(f.copies);
  c.trials = f.trials;
  c.seed = f.seed;
  if (std::filesystem::exists(f.truth)) {
    std::ifstream in(f.truth);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw SchemaError("truth file '" + f.truth + "': " + e.what());
    }
    c.truth = truth_from_json(j, c.task);
  } else {
    c.truth = truth_preset(f.truth, c.task);
  }
  c.order = f.order;
  c.reg_scale = f.reg_scale;
  c.noiseless = f.noiseless;
  c.threads = f.threads;
  c.timing = f.timing;
  c.validate();
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

int run_simulate(const Flags& f) {
  const ExperimentConfig cfg = make_config(f);
  if (cfg.copies_grid.size() != 1) throw ConfigError("simulate takes a single --copies value");
  const Scenario scenario(cfg);
  const long copies = cfg.copies_grid.front();
  Rng rng(trial_seed(cfg.seed, copies, 0));
  CountsFile file;
  file.header = {{"measurement", cfg.measurement},
                 {"task", to_string(cfg.task)},
                 {"copies", copies},
                 {"copies_per_shot", scenario.copies_per_shot()},
                 {"seed", cfg.seed},
                 {"truth", scenario.truth_json()}};
  file.records = scenario.sample(copies, rng);
  emit(f.out, to_json(file).dump(2) + "\n");
  return kOk;
}

int run_estimate(Flags f, const CLI::App& app) {
  const IngestedCounts data = ingest_counts(f.counts);
  const json& h = data.file.header;
  // Header fields fill in flags the caller left unset.
  if (app.count("--task") == 0 && h.contains("task")) f.task = h["task"].get<std::string>();
  if (app.count("--measurement") == 0) f.measurement = h["measurement"].get<std::string>();
  if (app.count("--seed") == 0 && h.contains("seed")) f.seed = h["seed"].get<std::uint64_t>();

  long shots = 0;
  for (const auto& r : data.file.records) shots += r.shots;
  // Size a throwaway scenario first: N must be a multiple of the copies per shot.
  Flags probe = f;
  probe.copies = "6";
  probe.trials = 1;
  probe.noiseless = true;
  ExperimentConfig cfg = make_config(probe);
  {
    const Scenario sizing(cfg);
    cfg.copies_grid = {shots * sizing.copies_per_shot()};
  }
  cfg.noiseless = false;
  const Scenario scenario(cfg);
  const auto ids = scenario.setting_ids();
  if (ids.size() != data.file.records.size()) {
    throw SchemaError("counts file has " + std::to_string(data.file.records.size()) + " records, the " +
                      to_string(cfg.task) + " design expects " + std::to_string(ids.size()));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != data.file.records[i].setting_id) {
      throw SchemaError("record " + std::to_string(i) + " (" + data.file.records[i].setting_id + "): expected setting '" +
                        ids[i] + "'");
    }
  }
  LinearModel model = scenario.model();
  attach_counts(model, data.file.records);
  const long copies = cfg.copies_grid.front();
  BenchEstimate est;
  try {
    est = scenario.estimate(model, copies);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    std::cerr << "estimator failed: " << e.what() << "\n";
    return kEstimatorFailure;
  }
  json out = {{"task", to_string(cfg.task)},
              {"estimator", to_string(cfg.estimator)},
              {"measurement", cfg.measurement},
              {"N", copies},
              {"shots", shots},
              {"residual", est.residual},
              {"result", est.detail}};
  emit(f.out, out.dump(2) + "\n");
  return kOk;
}

int run_bench(const Flags& f) {
  if (f.format != "csv" && f.format != "json") throw ConfigError("--format must be csv or json");
  const ExperimentConfig cfg = make_config(f);
  const Scenario scenario(cfg);
  const std::vector<MseRow> rows = run_experiment(cfg);
  const json summary = summary_json(cfg, rows, scenario.bloch_length());
  emit(f.out, f.format == "csv" ? rows_to_csv(rows) : summary.dump(2) + "\n");
  if (!summary["slope"].is_null()) std::cerr << "slope " << summary["slope"]["slope"].get<double>() << "\n";
  const int failures = summary["failures"].get<int>();
  if (failures > 0) {
    std::cerr << failures << " of " << rows.size() << " trials failed; first: "
              << summary["failed_rows"][0]["error"].get<std::string>() << "\n";
    return kEstimatorFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective tomography simulator and estimator bench"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* simulate = app.add_subcommand("simulate", "draw a counts file for one N");
  add_common(simulate, f);
  simulate->add_option("--copies", f.copies, "total state copies N")->capture_default_str();

  CLI::App* estimate = app.add_subcommand("estimate", "estimate from an ingested counts file");
  add_common(estimate, f);
  estimate->add_option("--counts", f.counts, "counts file (JSON)")->required();

  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo MSE grid with slope fit and bound overlays");
  add_common(bench, f);
  bench->add_option("--copies", f.copies, "comma-separated N grid")->capture_default_str();
  bench->add_option("--trials", f.trials, "trials per N")->capture_default_str();
  bench->add_flag("--noiseless", f.noiseless, "use exact probabilities instead of sampled counts");
  bench->add_option("--format", f.format, "csv (rows) or json (summary)")->capture_default_str();
  bench->add_option("--threads", f.threads, "worker threads, 0 for all cores")->capture_default_str();
  bench->add_flag("--timing", f.timing, "record per-trial wall time (outputs then vary between runs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (simulate->parsed()) return run_simulate(f);
    if (estimate->parsed()) return run_estimate(f, *estimate);
    return run_bench(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEstimatorFailure;
  }
}
