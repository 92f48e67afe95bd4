#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ctomo/bench.hpp"

namespace ctomo {

using nlohmann::json;

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json slope_json(const std::vector<MseRow>& rows, std::optional<std::size_t> object) {
  try {
    const SlopeFit f = fit_slope(rows, object);
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"stderr", f.std_error}};
  } catch (const Error&) {
    return nullptr;
  }
}

}  // namespace

SlopeFit fit_slope(const std::vector<long>& copies, const std::vector<double>& mean_mse) {
  if (copies.size() != mean_mse.size()) throw DimensionError("fit_slope: copies and means differ in length");
  std::map<long, int> distinct;
  for (long n : copies) {
    if (n <= 0) throw ConfigError("fit_slope: copies must be positive");
    ++distinct[n];
  }
  if (distinct.size() < 3) {
    throw ConfigError("fit_slope: insufficient grid, need at least 3 distinct N, got " + std::to_string(distinct.size()));
  }
  const std::size_t n = copies.size();
  RVector x(static_cast<Index>(n)), y(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mean_mse[i] > 0.0)) throw DegenerateInputError("fit_slope: mean MSE must be positive to take logarithms");
    x(static_cast<Index>(i)) = std::log10(static_cast<double>(copies[i]));
    y(static_cast<Index>(i)) = std::log10(mean_mse[i]);
  }
  const double mx = x.mean(), my = y.mean();
  const RVector dx = x.array() - mx, dy = y.array() - my;
  const double sxx = dx.squaredNorm();
  SlopeFit f;
  f.slope = dx.dot(dy) / sxx;
  f.intercept = my - f.slope * mx;
  const RVector res = y.array() - (f.intercept + f.slope * x.array());
  f.std_error = n > 2 ? std::sqrt(res.squaredNorm() / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}

SlopeFit fit_slope(const std::vector<MseRow>& rows, std::optional<std::size_t> object) {
  std::vector<long> copies;
  std::vector<double> means;
  for (const GroupSummary& g : summarize(rows)) {
    if (g.trials == g.failures) continue;
    copies.push_back(g.copies);
    if (object) {
      if (*object >= g.object_means.size()) throw DimensionError("fit_slope: no object " + std::to_string(*object));
      means.push_back(g.object_means[*object]);
    } else {
      means.push_back(g.mean);
    }
  }
  return fit_slope(copies, means);
}

double collective_bound(double s, long copies) {
  if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("collective_bound: s must lie in [0, 1]");
  if (copies < 1) throw ConfigError("collective_bound: N must be positive");
  const double n = static_cast<double>(copies);
  const double breakpoint = (3.0 + 4.0 * std::sqrt(3.0)) / 13.0;
  if (s <= breakpoint) {
    const double a = 2.0 + std::sqrt(1.0 - s * s);
    return a * a / (3.0 * n);
  }
  return s * (1.0 + s) * (3.0 - s) / ((3.0 * s - 1.0) * n);
}

CrbOverlay crb_overlays(long copies) {
  if (copies < 1) throw ConfigError("crb_overlays: N must be positive");
  const double n = static_cast<double>(copies);
  return {std::pow(10.0, 1.1978) / n, std::pow(10.0, 0.4669) / n};
}

IngestedCounts ingest_counts(const json& j) {
  IngestedCounts out;
  out.file = counts_file_from_json(j);
  for (std::size_t i = 0; i < out.file.records.size(); ++i) {
    const CountsRecord& r = out.file.records[i];
    if (r.shots <= 0) throw SchemaError("record " + std::to_string(i) + " (" + r.setting_id + "): no shots");
    RVector f(static_cast<Index>(r.outcome_counts.size()));
    for (std::size_t l = 0; l < r.outcome_counts.size(); ++l) {
      f(static_cast<Index>(l)) = static_cast<double>(r.outcome_counts[l]) / static_cast<double>(r.shots);
    }
    out.frequencies.push_back(std::move(f));
  }
  return out;
}

IngestedCounts ingest_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open counts file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("counts file '" + path + "' is not valid JSON: " + e.what());
  }
  return ingest_counts(j);
}

std::vector<GroupSummary> summarize(const std::vector<MseRow>& rows) {
  std::map<long, std::vector<const MseRow*>> groups;
  for (const auto& r : rows) groups[r.copies].push_back(&r);
  std::vector<GroupSummary> out;
  for (const auto& [copies, members] : groups) {
    GroupSummary g;
    g.copies = copies;
    g.shots = members.front()->shots;
    g.trials = static_cast<int>(members.size());
    std::vector<double> values;
    for (const MseRow* r : members) {
      if (r->failure) {
        ++g.failures;
        continue;
      }
      values.push_back(r->mse);
      if (g.object_means.size() < r->object_mse.size()) g.object_means.resize(r->object_mse.size(), 0.0);
      for (std::size_t k = 0; k < r->object_mse.size(); ++k) g.object_means[k] += r->object_mse[k];
    }
    const double count = static_cast<double>(values.size());
    if (!values.empty()) {
      for (double v : values) g.mean += v;
      g.mean /= count;
      for (double& m : g.object_means) m /= count;
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - g.mean) * (v - g.mean);
        g.std_error = std::sqrt(ss / (count - 1.0) / count);
      }
    } else {
      g.mean = std::nan("");
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::string rows_to_csv(const std::vector<MseRow>& rows) {
  std::ostringstream os;
  os << "task,estimator,measurement,N,trial,mse,residual,wall_time_s\n";
  for (const auto& r : rows) {
    os << to_string(r.task) << ',' << to_string(r.estimator) << ',' << r.measurement << ',' << r.copies << ','
       << r.trial << ',' << number(r.mse) << ',' << number(r.residual) << ',' << number(r.wall_time) << '\n';
  }
  return os.str();
}

json summary_json(const ExperimentConfig& cfg, const std::vector<MseRow>& rows,
                  const std::optional<double>& bloch_length) {
  json groups = json::array();
  std::size_t objects = 0;
  int failures = 0;
  for (const GroupSummary& g : summarize(rows)) {
    const CrbOverlay crb = crb_overlays(g.copies);
    json e = {{"N", g.copies},
              {"shots", g.shots},
              {"trials", g.trials},
              {"failures", g.failures},
              {"mean_mse", finite_or_null(g.mean)},
              {"stderr", g.std_error},
              {"object_mean_mse", g.object_means},
              {"classical_crb", crb.classical},
              {"quantum_crb", crb.quantum}};
    if (bloch_length) e["collective_bound"] = collective_bound(*bloch_length, g.copies);
    objects = std::max(objects, g.object_means.size());
    failures += g.failures;
    groups.push_back(std::move(e));
  }
  json object_slopes = json::array();
  for (std::size_t k = 0; k < objects; ++k) object_slopes.push_back(slope_json(rows, k));
  json failed = json::array();
  for (const auto& r : rows)
    if (r.failure) failed.push_back({{"N", r.copies}, {"trial", r.trial}, {"error", *r.failure}});
  return {{"task", to_string(cfg.task)},
          {"estimator", to_string(cfg.estimator)},
          {"measurement", cfg.measurement},
          {"truth", cfg.truth.name},
          {"seed", cfg.seed},
          {"trials", cfg.trials},
          {"noiseless", cfg.noiseless},
          {"reg_scale", cfg.reg_scale},
          {"order", cfg.order},
          {"groups", groups},
          {"slope", slope_json(rows, std::nullopt)},
          {"object_slopes", object_slopes},
          {"failures", failures},
          {"failed_rows", failed}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace ctomo
