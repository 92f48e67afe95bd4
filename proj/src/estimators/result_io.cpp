#include "ctomo/estimators.hpp"
#include "ctomo/quantum_io.hpp"

namespace ctomo {

using nlohmann::json;

namespace {

const char* kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::kQst: return "qst";
    case TaskKind::kQdt: return "qdt";
    case TaskKind::kQpt: return "qpt";
  }
  return "unknown";
}

}  // namespace

json to_json(const TomographyResult& r) {
  json j;
  j["task"] = kind_name(r.kind);
  j["mode"] = r.mode == CopyMode::kIdentical ? "identical" : "distinct";
  json estimates = json::array();
  for (const auto& s : r.states) estimates.push_back(to_json(s));
  for (const auto& p : r.povms) estimates.push_back(to_json(p));
  for (const auto& x : r.processes) estimates.push_back(to_json(x));
  j["estimates"] = estimates;
  json inter = json::array();
  for (const auto& m : r.intermediate) inter.push_back(matrix_to_json(m));
  j["intermediate"] = inter;
  j["diagnostics"] = {{"inversion_residual", r.diagnostics.inversion_residual},
                      {"factor_residual", r.diagnostics.factor_residual},
                      {"degenerate_factor", r.diagnostics.degenerate_factor},
                      {"design_rank", r.diagnostics.design_rank},
                      {"projection_iterations", r.diagnostics.projection_iterations},
                      {"warnings", r.diagnostics.warnings}};
  return j;
}

}  // namespace ctomo
