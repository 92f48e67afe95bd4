#pragma once

#include <json.hpp>

#include "ctomo/quantum.hpp"

namespace ctomo {

// Complex entries are [re, im] pairs; matrices are row-major nested arrays.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QuantumState& s);
nlohmann::json to_json(const Povm& p);
nlohmann::json to_json(const ProcessMatrix& x);

QuantumState state_from_json(const nlohmann::json& j);
Povm povm_from_json(const nlohmann::json& j);
ProcessMatrix process_from_json(const nlohmann::json& j);

}  // namespace ctomo
