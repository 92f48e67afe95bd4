#include <cmath>
#include <numbers>
#include <string>

#include "ctomo/quantum.hpp"

namespace ctomo {

namespace {

CVector ket(std::initializer_list<Complex> amps) {
  CVector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (const auto& a : amps) v(i++) = a;
  return v;
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

CMatrix tensor_power(const CMatrix& m, int n) {
  CMatrix out = m;
  for (int k = 1; k < n; ++k) out = kron(out, m);
  return out;
}

}  // namespace

MubSet mub_states_and_measurements() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  const CVector zero = ket({1.0, 0.0});
  const CVector one = ket({0.0, 1.0});
  const CVector plus = r * ket({1.0, 1.0});
  const CVector minus = r * ket({1.0, -1.0});
  const CVector right = r * ket({1.0, -i});
  const CVector left = r * ket({1.0, i});

  const std::vector<std::vector<CVector>> bases = {
      {kron(zero, zero), kron(zero, one), kron(one, zero), kron(one, one)},
      {kron(right, plus), kron(right, minus), kron(left, plus), kron(left, minus)},
      {kron(plus, right), kron(minus, right), kron(plus, left), kron(minus, left)},
      {r * (kron(right, zero) + i * kron(left, one)), r * (kron(right, zero) - i * kron(left, one)),
       r * (kron(right, one) + i * kron(left, zero)), r * (kron(right, one) - i * kron(left, zero))},
      {r * (kron(right, right) + i * kron(left, left)),
       r * (kron(right, right) - i * kron(left, left)),
       r * (kron(right, left) + i * kron(left, right)),
       r * (kron(right, left) - i * kron(left, right))},
  };

  MubSet out;
  for (const auto& basis : bases) {
    std::vector<CMatrix> elements;
    for (const auto& v : basis) {
      out.states.push_back(QuantumState::pure(v));
      elements.push_back(projector(v));
    }
    out.settings.emplace_back(std::move(elements));
  }
  return out;
}

std::vector<CVector> sic_qubit_vectors() {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  const double t = 2.0 * std::numbers::pi / 3.0;
  return {ket({1.0, 0.0}), ket({a, b}), ket({a, b * std::polar(1.0, t)}),
          ket({a, b * std::polar(1.0, -t)})};
}

Povm sic_qubit() {
  std::vector<CMatrix> elements;
  for (const auto& v : sic_qubit_vectors()) elements.push_back(0.5 * projector(v));
  return Povm(std::move(elements));
}

Povm collective_two_copy_povm() {
  std::vector<CMatrix> elements;
  for (const auto& v : sic_qubit_vectors()) elements.push_back(0.75 * tensor_power(projector(v), 2));
  const double r = 1.0 / std::sqrt(2.0);
  elements.push_back(projector(ket({0.0, r, -r, 0.0})));
  return Povm(std::move(elements));
}

Povm collective_three_copy_povm() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  const std::vector<CVector> octahedron = {ket({1.0, 0.0}), ket({0.0, 1.0}),
                                           r * ket({1.0, 1.0}), r * ket({1.0, -1.0}),
                                           r * ket({1.0, i}), r * ket({1.0, -i})};
  std::vector<CMatrix> elements;
  CMatrix rest = CMatrix::Identity(8, 8);
  for (const auto& v : octahedron) {
    elements.push_back((2.0 / 3.0) * tensor_power(projector(v), 3));
    rest -= elements.back();
  }
  elements.push_back(hermitian_part(rest));
  return Povm(std::move(elements));
}

Povm computational_povm(int d) {
  std::vector<CMatrix> elements;
  for (int k = 0; k < d; ++k) {
    CMatrix p = CMatrix::Zero(d, d);
    p(k, k) = 1.0;
    elements.push_back(p);
  }
  return Povm(std::move(elements));
}

std::vector<CMatrix> bit_phase_flip_kraus(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidObjectError("bit_phase_flip: p = " + std::to_string(p) + " outside [0, 1]");
  }
  return {std::sqrt(p) * CMatrix::Identity(2, 2), std::sqrt(1.0 - p) * pauli_y()};
}

ProcessMatrix bit_phase_flip(double p) {
  return ProcessMatrix(process_from_kraus(bit_phase_flip_kraus(p)), true);
}

ProcessMatrix identity_process(int d) {
  const CVector v = vec(CMatrix::Identity(d, d));
  return ProcessMatrix(v * v.adjoint(), true);
}

}  // namespace ctomo
