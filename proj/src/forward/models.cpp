#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "ctomo/forward.hpp"

namespace ctomo {

namespace {

HermitianBasis product_of(const std::vector<HermitianBasis>& bases) {
  if (bases.empty()) throw DimensionError("build_phi: no factor bases");
  HermitianBasis joint = bases.front();
  for (std::size_t k = 1; k < bases.size(); ++k) joint = product_basis(joint, bases[k]);
  return joint;
}

// Frobenius inner products of a fixed operator with each basis element.
RVector coefficients(const CMatrix& op, const HermitianBasis& basis) {
  return parameterize(op, basis).values;
}

std::string probe_label(std::size_t m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "probe-%02zu", m);
  return buf;
}

}  // namespace

std::size_t MeasurementScheme::outcome_count() const {
  std::size_t n = 0;
  for (const auto& s : settings) n += s.size();
  return n;
}

MeasurementScheme mub_scheme() {
  MubSet mub = mub_states_and_measurements();
  MeasurementScheme s;
  s.name = "mub";
  s.settings = std::move(mub.settings);
  s.setting_ids = {"A", "B", "C", "D", "E"};
  s.copies_per_shot = 2;
  return s;
}

MeasurementScheme single_povm_scheme(const std::string& name, Povm povm, int copies_per_shot) {
  MeasurementScheme s;
  s.name = name;
  s.settings.push_back(std::move(povm));
  s.setting_ids = {name};
  s.copies_per_shot = copies_per_shot;
  return s;
}

MeasurementScheme sic_product_scheme(int factors) {
  const Povm sic = sic_qubit();
  std::vector<CMatrix> elements = sic.elements();
  for (int f = 1; f < factors; ++f) {
    std::vector<CMatrix> next;
    for (const auto& a : elements)
      for (const auto& b : sic.elements()) next.push_back(kron(a, b));
    elements = std::move(next);
  }
  return single_povm_scheme("sic", Povm(std::move(elements)), factors);
}

long LinearModel::total_dim() const {
  long d = 1;
  for (int f : factor_dims) d *= f;
  return d;
}

void LinearModel::validate() const {
  const Index expected = design.rows() * blocks();
  if (observation.size() != 0 && observation.size() != expected) {
    throw DimensionError("LinearModel: observation length " + std::to_string(observation.size()) +
                         " differs from " + std::to_string(expected));
  }
  for (long s : shots_per_row)
    if (s < 0) throw DimensionError("LinearModel: negative shot count");
}

LinearModel build_phi(const Povm& povm, const HermitianBasis& basis1, const HermitianBasis& basis2) {
  MeasurementScheme s = single_povm_scheme("custom", povm, 2);
  return build_phi(s, {basis1, basis2});
}

LinearModel build_phi(const MeasurementScheme& scheme, const std::vector<HermitianBasis>& bases) {
  const HermitianBasis joint = product_of(bases);
  if (scheme.dim() != joint.dim) {
    throw DimensionError("build_phi: measurement acts on dimension " + std::to_string(scheme.dim()) +
                         ", factors give " + std::to_string(joint.dim));
  }
  LinearModel model;
  model.kind = TaskKind::kQst;
  for (const auto& b : bases) model.factor_dims.push_back(b.dim);
  model.design.resize(static_cast<Index>(scheme.outcome_count()),
                      static_cast<Index>(joint.elements.size()));
  Index row = 0;
  for (const auto& setting : scheme.settings) {
    model.setting_sizes.push_back(static_cast<int>(setting.size()));
    for (const auto& p : setting.elements()) {
      model.design.row(row++) = coefficients(p, joint).cast<Complex>().transpose();
    }
  }
  return model;
}

LinearModel build_theta(const std::vector<QuantumState>& probes, const HermitianBasis& basis1,
                        const HermitianBasis& basis2, int outcomes_left, int outcomes_right) {
  const HermitianBasis joint = product_basis(basis1, basis2);
  if (probes.empty()) throw DimensionError("build_theta: no probe states");
  LinearModel model;
  model.kind = TaskKind::kQdt;
  model.factor_dims = {basis1.dim, basis2.dim};
  model.outcomes_left = outcomes_left;
  model.outcomes_right = outcomes_right;
  model.design.resize(static_cast<Index>(probes.size()), static_cast<Index>(joint.elements.size()));
  for (std::size_t m = 0; m < probes.size(); ++m) {
    if (probes[m].dim() != joint.dim) throw DimensionError("build_theta: probe dimension mismatch");
    model.design.row(static_cast<Index>(m)) =
        coefficients(probes[m].matrix(), joint).cast<Complex>().transpose();
  }
  return model;
}

std::vector<CMatrix> build_process_model(const std::vector<QuantumState>& probes) {
  std::vector<CMatrix> blocks;
  for (const auto& probe : probes) {
    const int d = probe.dim();
    const int d2 = d * d;
    const CMatrix& rho = probe.matrix();
    CMatrix m = CMatrix::Zero(d2, static_cast<Index>(d2) * d2);
    // E_j rho E_k^dagger = |a><b| rho |e><c| has rho(b, e) at (a, c).
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            const Index j = a * d + b, k = c * d + e;
            m(a + c * d, j + k * d2) = rho(b, e);
          }
    blocks.push_back(std::move(m));
  }
  return blocks;
}

LinearModel build_collective_process_model(const std::vector<QuantumState>& probes,
                                           const MeasurementScheme& scheme, int d1, int d2,
                                           QptData data, bool loss_outcome, bool scale_setting) {
  const int dj = d1 * d2;
  if (probes.empty()) throw DimensionError("build_collective_process_model: no probes");
  for (const auto& p : probes)
    if (p.dim() != dj) throw DimensionError("build_collective_process_model: probe dimension");
  if (scheme.dim() != dj) throw DimensionError("build_collective_process_model: measurement dimension");

  const CMatrix kk = collective_permutation(d1, d2);
  const CMatrix lift = kron(kk, kk) * collective_permutation(d1 * d1, d2 * d2);
  const std::vector<CMatrix> blocks = build_process_model(probes);

  LinearModel model;
  model.kind = TaskKind::kQpt;
  model.factor_dims = {d1, d2};
  model.qpt_data = data;
  model.probes = static_cast<int>(probes.size());
  model.loss_outcome = loss_outcome;
  model.scale_setting = scale_setting;
  for (const auto& s : scheme.settings)
    model.probe_setting_sizes.push_back(static_cast<int>(s.size()) + (loss_outcome ? 1 : 0));

  const HermitianBasis gm = gell_mann_basis(dj);
  model.state_design.resize(static_cast<Index>(scheme.outcome_count()),
                            static_cast<Index>(gm.elements.size()));
  {
    Index row = 0;
    for (const auto& s : scheme.settings)
      for (const auto& p : s.elements()) model.state_design.row(row++) = coefficients(p, gm).transpose();
  }

  const Index dd = static_cast<Index>(dj) * dj;
  if (data == QptData::kOutputStates) {
    model.design.resize(static_cast<Index>(blocks.size()) * dd, dd * dd);
    for (std::size_t m = 0; m < blocks.size(); ++m)
      model.design.middleRows(static_cast<Index>(m) * dd, dd) = blocks[m] * lift;
  } else {
    const Index per_probe = static_cast<Index>(scheme.outcome_count());
    model.design.resize(static_cast<Index>(blocks.size()) * per_probe, dd * dd);
    for (std::size_t m = 0; m < blocks.size(); ++m) {
      const CMatrix lifted = blocks[m] * lift;
      Index row = static_cast<Index>(m) * per_probe;
      for (const auto& s : scheme.settings)
        for (const auto& p : s.elements()) model.design.row(row++) = vec(p).adjoint() * lifted;
    }
  }
  return model;
}

RVector born_probabilities(const LinearModel& model, const CVector& tensor) {
  if (tensor.size() != model.design.cols()) {
    throw DimensionError("born_probabilities: tensor length " + std::to_string(tensor.size()) +
                         " differs from design width " + std::to_string(model.design.cols()));
  }
  return (model.design * tensor).real();
}

std::vector<RVector> setting_probabilities(const MeasurementScheme& scheme, const CMatrix& joint_state) {
  if (joint_state.rows() != scheme.dim()) throw DimensionError("setting_probabilities: state dimension");
  std::vector<RVector> out;
  for (const auto& s : scheme.settings) {
    RVector p(static_cast<Index>(s.size()));
    for (std::size_t l = 0; l < s.size(); ++l) p(static_cast<Index>(l)) = (s[l] * joint_state).trace().real();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RVector> setting_probabilities(const std::vector<QuantumState>& probes,
                                           const Povm& left, const Povm& right) {
  std::vector<CMatrix> joint;
  for (const auto& p : left.elements())
    for (const auto& q : right.elements()) joint.push_back(kron(p, q));
  std::vector<RVector> out;
  for (const auto& probe : probes) {
    if (probe.dim() != left.dim() * right.dim()) throw DimensionError("setting_probabilities: probe dimension");
    RVector p(static_cast<Index>(joint.size()));
    for (std::size_t i = 0; i < joint.size(); ++i)
      p(static_cast<Index>(i)) = (joint[i] * probe.matrix()).trace().real();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RVector> setting_probabilities(const LinearModel& qpt_model,
                                           const std::vector<QuantumState>& probes,
                                           const MeasurementScheme& scheme, const CMatrix& joint_x,
                                           double scale_value) {
  std::vector<RVector> out;
  for (const auto& probe : probes) {
    const CMatrix output = apply_process(joint_x, probe.matrix());
    for (const auto& s : scheme.settings) {
      RVector p(static_cast<Index>(s.size()) + (qpt_model.loss_outcome ? 1 : 0));
      double total = 0.0;
      for (std::size_t l = 0; l < s.size(); ++l) {
        p(static_cast<Index>(l)) = (s[l] * output).trace().real();
        total += p(static_cast<Index>(l));
      }
      if (qpt_model.loss_outcome) p(p.size() - 1) = std::max(0.0, 1.0 - total);
      out.push_back(std::move(p));
    }
  }
  if (qpt_model.scale_setting) {
    RVector p(2);
    p << scale_value, 1.0 - scale_value;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> setting_ids(const LinearModel& model, const MeasurementScheme* scheme) {
  std::vector<std::string> ids;
  switch (model.kind) {
    case TaskKind::kQst:
      if (scheme) return scheme->setting_ids;
      for (std::size_t s = 0; s < model.setting_sizes.size(); ++s) ids.push_back("setting-" + std::to_string(s));
      return ids;
    case TaskKind::kQdt:
      for (Index m = 0; m < model.design.rows(); ++m) ids.push_back(probe_label(static_cast<std::size_t>(m)));
      return ids;
    case TaskKind::kQpt:
      for (int m = 0; m < model.probes; ++m)
        for (std::size_t s = 0; s < model.probe_setting_sizes.size(); ++s) {
          const std::string sid = scheme && s < scheme->setting_ids.size() ? scheme->setting_ids[s]
                                                                          : std::to_string(s);
          ids.push_back(probe_label(static_cast<std::size_t>(m)) + "/" + sid);
        }
      if (model.scale_setting) ids.push_back("scale-calibration");
      return ids;
  }
  return ids;
}

Completeness completeness_check(const LinearModel& model, long required_rank) {
  Completeness c;
  c.rank = static_cast<long>(numerical_rank(model.design, 1e-8));
  c.complete = c.rank == required_rank;
  return c;
}

}  // namespace ctomo
