#include <numeric>
#include <string>

#include "ctomo/forward.hpp"

namespace ctomo {

using nlohmann::json;

json to_json(const CountsRecord& r) {
  return {{"setting_id", r.setting_id}, {"outcome_counts", r.outcome_counts}, {"shots", r.shots}};
}

CountsRecord counts_record_from_json(const json& j, std::size_t index) {
  const std::string where = "record " + std::to_string(index);
  if (!j.is_object()) throw SchemaError(where + ": not an object");
  CountsRecord r;
  if (!j.contains("setting_id") || !j["setting_id"].is_string()) {
    throw SchemaError(where + ": missing string \"setting_id\"");
  }
  r.setting_id = j["setting_id"].get<std::string>();
  const std::string named = where + " (" + r.setting_id + ")";
  if (!j.contains("outcome_counts") || !j["outcome_counts"].is_array()) {
    throw SchemaError(named + ": missing \"outcome_counts\" array");
  }
  for (const auto& c : j["outcome_counts"]) {
    if (!c.is_number_integer() || c.get<long>() < 0) {
      throw SchemaError(named + ": outcome counts must be nonnegative integers");
    }
    r.outcome_counts.push_back(c.get<long>());
  }
  if (!j.contains("shots") || !j["shots"].is_number_integer()) {
    throw SchemaError(named + ": missing integer \"shots\"");
  }
  r.shots = j["shots"].get<long>();
  const long total = std::accumulate(r.outcome_counts.begin(), r.outcome_counts.end(), 0L);
  if (total != r.shots) {
    throw SchemaError(named + ": counts sum to " + std::to_string(total) + " but shots is " +
                      std::to_string(r.shots));
  }
  return r;
}

json to_json(const CountsFile& f) {
  json records = json::array();
  for (const auto& r : f.records) records.push_back(to_json(r));
  return {{"header", f.header}, {"records", records}};
}

CountsFile counts_file_from_json(const json& j) {
  if (!j.is_object() || !j.contains("records") || !j["records"].is_array()) {
    throw SchemaError("counts file: expected an object with a \"records\" array");
  }
  CountsFile f;
  f.header = j.value("header", json::object());
  if (!f.header.is_object() || !f.header.contains("measurement")) {
    throw SchemaError("counts file: header must name the measurement family");
  }
  std::size_t i = 0;
  for (const auto& r : j["records"]) f.records.push_back(counts_record_from_json(r, i++));
  return f;
}

}  // namespace ctomo
