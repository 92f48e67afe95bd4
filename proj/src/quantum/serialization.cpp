#include <string>

#include "ctomo/quantum_io.hpp"

namespace ctomo {

using nlohmann::json;

namespace {

int read_dim(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer()) {
    throw SchemaError("missing integer \"dim\" field");
  }
  return j["dim"].get<int>();
}

CMatrix read_square(const json& j, int side, const char* what) {
  CMatrix m = matrix_from_json(j);
  if (m.rows() != side || m.cols() != side) {
    throw SchemaError(std::string(what) + ": expected " + std::to_string(side) + "x" +
                      std::to_string(side) + " matrix");
  }
  return m;
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw SchemaError("matrix must be a nested array");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw SchemaError("matrix row " + std::to_string(i) + " has inconsistent length");
    }
    for (Index k = 0; k < cols; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw SchemaError("matrix entry (" + std::to_string(i) + "," + std::to_string(k) +
                          ") must be a number or [re, im]");
      }
    }
  }
  return m;
}

json to_json(const QuantumState& s) {
  return {{"dim", s.dim()}, {"matrix", matrix_to_json(s.matrix())}};
}

json to_json(const Povm& p) {
  json elements = json::array();
  for (const auto& e : p.elements()) elements.push_back(matrix_to_json(e));
  return {{"dim", p.dim()}, {"elements", elements}};
}

json to_json(const ProcessMatrix& x) {
  return {{"dim", x.dim()},
          {"trace_preserving", x.trace_preserving()},
          {"matrix", matrix_to_json(x.matrix())}};
}

QuantumState state_from_json(const json& j) {
  const int d = read_dim(j);
  if (!j.contains("matrix")) throw SchemaError("state: missing \"matrix\"");
  return QuantumState(read_square(j["matrix"], d, "state"));
}

Povm povm_from_json(const json& j) {
  const int d = read_dim(j);
  if (!j.contains("elements") || !j["elements"].is_array()) {
    throw SchemaError("povm: missing \"elements\" array");
  }
  std::vector<CMatrix> elements;
  for (const auto& e : j["elements"]) elements.push_back(read_square(e, d, "povm element"));
  return Povm(std::move(elements));
}

ProcessMatrix process_from_json(const json& j) {
  const int d = read_dim(j);
  if (!j.contains("matrix")) throw SchemaError("process: missing \"matrix\"");
  const bool tp = j.value("trace_preserving", true);
  return ProcessMatrix(read_square(j["matrix"], d * d, "process"), tp);
}

}  // namespace ctomo
