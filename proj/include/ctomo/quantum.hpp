#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctomo/linalg.hpp"

namespace ctomo {

using Rng = std::mt19937_64;

struct Tolerances {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double psd = 1e-10;
  double completeness = 1e-10;
  double partial_trace = 1e-8;
};

struct HermitianBasis {
  int dim = 0;
  std::vector<CMatrix> elements;
};

// Identity, symmetric pairs, antisymmetric pairs, diagonal; each of unit
// Hilbert-Schmidt norm.
HermitianBasis gell_mann_basis(int d);

// Kronecker products of two bases, index i * |b| + j.
HermitianBasis product_basis(const HermitianBasis& a, const HermitianBasis& b);

struct ParamVector {
  RVector values;
};

ParamVector parameterize(const CMatrix& obj, const HermitianBasis& basis);
CMatrix deparameterize(const ParamVector& theta, const HermitianBasis& basis);

class QuantumState {
 public:
  // Validates Hermiticity, unit trace and PSD; throws InvalidObjectError.
  explicit QuantumState(CMatrix rho, const Tolerances& tol = {});
  static QuantumState pure(const CVector& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }

 private:
  CMatrix rho_;
};

class Povm {
 public:
  explicit Povm(std::vector<CMatrix> elements, const Tolerances& tol = {});

  int dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<CMatrix>& elements() const { return elements_; }
  const CMatrix& operator[](std::size_t i) const { return elements_[i]; }

 private:
  int dim_ = 0;
  std::vector<CMatrix> elements_;
};

// Natural-basis process matrix X with E(rho) = sum_jk X_jk E_j rho E_k^dagger,
// E_i = |j><k| with i = j d + k (zero-based).
class ProcessMatrix {
 public:
  ProcessMatrix(CMatrix x, bool trace_preserving, const Tolerances& tol = {});

  int dim() const { return dim_; }
  const CMatrix& matrix() const { return x_; }
  bool trace_preserving() const { return tp_; }

 private:
  int dim_ = 0;
  CMatrix x_;
  bool tp_ = true;
};

double min_eigenvalue(const CMatrix& hermitian);

// Natural basis element E_i (zero-based i = j d + k).
CMatrix natural_basis_element(int d, int i);

CMatrix process_from_kraus(const std::vector<CMatrix>& kraus);
CMatrix apply_kraus(const std::vector<CMatrix>& kraus, const CMatrix& rho);
CMatrix apply_process(const CMatrix& x, const CMatrix& rho);

// Joint process of two independent channels:
// (I (x) K_{d2 d1} (x) I)(X1 (x) X2)(I (x) K_{d2 d1} (x) I)^T.
CMatrix collective_permutation(int d1, int d2);
CMatrix joint_process(const CMatrix& x1, int d1, const CMatrix& x2, int d2);

struct MubSet {
  std::vector<QuantumState> states;  // 20 rank-one states, setting-major
  std::vector<Povm> settings;        // bases A..E
};

MubSet mub_states_and_measurements();
std::vector<CVector> sic_qubit_vectors();
Povm sic_qubit();
Povm collective_two_copy_povm();
Povm collective_three_copy_povm();
Povm computational_povm(int d);

ProcessMatrix bit_phase_flip(double p);
std::vector<CMatrix> bit_phase_flip_kraus(double p);
ProcessMatrix identity_process(int d);

CMatrix haar_random_unitary(int d, Rng& rng);
QuantumState random_state(int d, const std::vector<double>& spectrum, Rng& rng);
CVector random_pure_vector(int d, Rng& rng);

double purity(const QuantumState& s);

// Pauli matrices.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

}  // namespace ctomo
