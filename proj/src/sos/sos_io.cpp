#include <cmath>

#include "ctomo/sos.hpp"

namespace ctomo {

namespace {

nlohmann::json vector_json(const RVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

const char* kind_name(VariableBlock::Kind k) {
  switch (k) {
    case VariableBlock::Kind::kState: return "state";
    case VariableBlock::Kind::kPovm: return "povm";
    case VariableBlock::Kind::kProcess: return "process";
    case VariableBlock::Kind::kPureVector: return "pure_vector";
    case VariableBlock::Kind::kUnitary: return "unitary";
    case VariableBlock::Kind::kFamily: return "family";
  }
  return "unknown";
}

nlohmann::json constraints_json(const std::vector<Polynomial>& polys, const std::vector<std::string>& labels) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < polys.size(); ++i) out.push_back({{"label", labels[i]}, {"polynomial", to_json(polys[i])}});
  return out;
}

}  // namespace

nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exponents", e}, {"coefficient", c}});
  return {{"num_vars", p.num_vars()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const nlohmann::json& j, int num_vars) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    throw SchemaError("polynomial: expected an object with a 'terms' array");
  }
  if (j.contains("num_vars") && j["num_vars"].get<int>() != num_vars) {
    throw SchemaError("polynomial: num_vars differs from the expected " + std::to_string(num_vars));
  }
  Polynomial p(num_vars);
  for (std::size_t i = 0; i < j["terms"].size(); ++i) {
    const auto& t = j["terms"][i];
    if (!t.contains("exponents") || !t.contains("coefficient")) {
      throw SchemaError("polynomial: term " + std::to_string(i) + " lacks exponents or coefficient");
    }
    const auto e = t["exponents"].get<Exponents>();
    if (static_cast<int>(e.size()) != num_vars) throw SchemaError("polynomial: term " + std::to_string(i) + " has the wrong arity");
    p.add_term(e, t["coefficient"].get<double>());
  }
  return p;
}

nlohmann::json to_json(const SemialgebraicProgram& p) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : p.blocks) {
    blocks.push_back({{"kind", kind_name(b.kind)}, {"offset", b.offset}, {"size", b.size}, {"dim", b.dim}, {"outcomes", b.outcomes}});
  }
  return {{"num_vars", p.num_vars},
          {"var_names", p.var_names},
          {"objective", to_json(p.objective)},
          {"equalities", constraints_json(p.equalities, p.equality_labels)},
          {"inequalities", constraints_json(p.inequalities, p.inequality_labels)},
          {"blocks", blocks}};
}

nlohmann::json to_json(const SosResult& r) {
  nlohmann::json j = {{"lower_bound", finite_or_null(r.lower_bound)},
                      {"status", to_string(r.status)},
                      {"iterations", r.iterations},
                      {"duality_gap", r.duality_gap},
                      {"certificate_residual", finite_or_null(r.certificate_residual)},
                      {"moment_ratio", finite_or_null(r.moment_ratio)},
                      {"order", r.order},
                      {"moments", r.moments}};
  j["candidate"] = r.candidate ? vector_json(*r.candidate) : nlohmann::json(nullptr);
  j["candidate_cost"] = r.candidate_cost ? nlohmann::json(*r.candidate_cost) : nlohmann::json(nullptr);
  j["gap"] = r.gap ? finite_or_null(*r.gap) : nlohmann::json(nullptr);
  j["extracted_candidate"] = r.extracted_candidate ? vector_json(*r.extracted_candidate) : nlohmann::json(nullptr);
  return j;
}

}  // namespace ctomo
