#include <cmath>
#include <memory>
#include <string>

#include "ctomo/estimators.hpp"

namespace ctomo {

namespace {

ProjectionOptions projection_options(const EstimatorConfig& cfg) {
  return {cfg.projection_tolerance, cfg.projection_max_iterations, cfg.fixed_point_tolerance};
}

// Uses the caller's prepared inverter when present, else builds one.
const LinearInverter& inverter_for(const LinearModel& model, const EstimatorConfig& cfg,
                                   const LinearInverter* prepared, std::unique_ptr<LinearInverter>& owned) {
  if (prepared) return *prepared;
  std::optional<double> fixed;
  if (cfg.inversion == Inversion::kTraceConstrained) {
    if (model.kind != TaskKind::kQst) throw ConfigError("trace_constrained inversion applies to QST models");
    fixed = 1.0 / std::sqrt(static_cast<double>(model.total_dim()));
  }
  owned = std::make_unique<LinearInverter>(model.design, cfg, fixed);
  return *owned;
}

HermitianBasis joint_basis(const std::vector<int>& dims) {
  HermitianBasis b = gell_mann_basis(dims.front());
  for (std::size_t k = 1; k < dims.size(); ++k) b = product_basis(b, gell_mann_basis(dims[k]));
  return b;
}

CMatrix from_coordinates(const CVector& x, const HermitianBasis& basis) {
  CMatrix out = CMatrix::Zero(basis.dim, basis.dim);
  for (std::size_t i = 0; i < basis.elements.size(); ++i) out += x(static_cast<Index>(i)) * basis.elements[i];
  return out;
}

CMatrix trace_scaled_hermitian(const CMatrix& m, double target, double tol, const char* what) {
  const Complex t = m.trace();
  if (std::abs(t) < tol) throw DegenerateInputError(std::string(what) + ": vanishing trace");
  return (target / 2.0) * (m / t + m.adjoint() / std::conj(t));
}

void require_kind(const LinearModel& model, TaskKind kind, const char* what) {
  if (model.kind != kind) throw ConfigError(std::string(what) + ": model has the wrong task kind");
  if (model.observation.size() == 0) throw ConfigError(std::string(what) + ": model has no observations");
  model.validate();
}

}  // namespace

TomographyResult estimate_qst(const LinearModel& model, const EstimatorConfig& cfg, CopyMode mode,
                              const LinearInverter* prepared) {
  require_kind(model, TaskKind::kQst, "estimate_qst");
  std::unique_ptr<LinearInverter> owned;
  const LinearInverter& inv = inverter_for(model, cfg, prepared, owned);

  TomographyResult result;
  result.kind = TaskKind::kQst;
  result.mode = mode;
  const CVector x = inv.solve(model.observation);
  result.diagnostics.design_rank = inv.rank();
  result.diagnostics.inversion_residual = (model.design * x - model.observation).norm();

  const CMatrix joint = from_coordinates(x, joint_basis(model.factor_dims));
  std::vector<CMatrix> factors;
  if (model.factor_dims.size() == 2) {
    const int d1 = model.factor_dims[0], d2 = model.factor_dims[1];
    if (cfg.factorization == Factorization::kMarginal) {
      auto [l, r] = marginal_factor(joint, d1, d2);
      result.diagnostics.factor_residual = (joint - kron(l, r)).norm();
      factors = {l, r};
    } else {
      KronFactors f = nearest_kron_factor(joint, d1, d2, KronNormalization::unit_trace_left(), cfg.degenerate_trace);
      result.diagnostics.factor_residual = f.residual;
      result.diagnostics.degenerate_factor = f.degenerate;
      factors = {f.left, f.right};
    }
    auto [a, b] = finalize_state_factors(factors[0], factors[1], cfg.degenerate_trace);
    factors = {a, b};
  } else {
    factors = n_copy_decouple(joint, model.factor_dims);
    CMatrix product = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) product = kron(product, factors[k]);
    result.diagnostics.factor_residual = (joint - product).norm();
    for (auto& f : factors) f = trace_scaled_hermitian(f, 1.0, cfg.degenerate_trace, "estimate_qst");
  }
  if (result.diagnostics.degenerate_factor) result.diagnostics.warnings.push_back("degenerate leading singular value");

  result.intermediate = factors;
  for (const auto& f : factors) result.states.push_back(project_state(f));
  if (mode == CopyMode::kIdentical) {
    CMatrix avg = CMatrix::Zero(result.states.front().dim(), result.states.front().dim());
    for (const auto& s : result.states) {
      if (s.dim() != result.states.front().dim()) throw ConfigError("identical mode needs equal factor dimensions");
      avg += s.matrix();
    }
    avg /= static_cast<double>(result.states.size());
    result.states = {QuantumState(hermitian_part(avg))};
  }
  return result;
}

TomographyResult estimate_qdt(const LinearModel& model, const EstimatorConfig& cfg, CopyMode mode,
                              const LinearInverter* prepared) {
  require_kind(model, TaskKind::kQdt, "estimate_qdt");
  std::unique_ptr<LinearInverter> owned;
  const LinearInverter& inv = inverter_for(model, cfg, prepared, owned);

  const int d1 = model.factor_dims[0], d2 = model.factor_dims[1];
  const int n_left = model.outcomes_left, n_right = model.outcomes_right;
  const Index m = model.design.rows();
  const HermitianBasis basis = joint_basis(model.factor_dims);

  TomographyResult result;
  result.kind = TaskKind::kQdt;
  result.mode = mode;
  result.diagnostics.design_rank = inv.rank();

  // Block (l, k) of the stacked matrix is the rearrangement of R_lk.
  const Index rows1 = static_cast<Index>(d1) * d1, rows2 = static_cast<Index>(d2) * d2;
  CMatrix stacked(n_left * rows1, n_right * rows2);
  double residual2 = 0.0;
  for (int l = 0; l < n_left; ++l)
    for (int k = 0; k < n_right; ++k) {
      const int b = l * n_right + k;
      const CVector y = model.observation.segment(b * m, m);
      const CVector x = inv.solve(y);
      residual2 += (model.design * x - y).squaredNorm();
      stacked.block(l * rows1, k * rows2, rows1, rows2) = kron_rearrange(from_coordinates(x, basis), d1, d2);
    }
  result.diagnostics.inversion_residual = std::sqrt(residual2);

  const SvdFactor f = best_rank_one(stacked);
  result.diagnostics.factor_residual = f.residual;
  result.diagnostics.degenerate_factor = f.degenerate;
  if (f.degenerate) result.diagnostics.warnings.push_back("degenerate leading singular value");

  std::vector<CMatrix> left, right;
  Complex total_trace = 0.0;
  for (int l = 0; l < n_left; ++l) {
    left.push_back(unvec(f.left.segment(l * rows1, rows1), d1, d1));
    total_trace += left.back().trace();
  }
  if (std::abs(total_trace) < cfg.degenerate_trace) throw DegenerateInputError("estimate_qdt: vanishing trace of the left family");
  const Complex alpha = static_cast<double>(d1) / total_trace;
  const CVector right_vec = f.sigma * f.right.conjugate();
  for (int k = 0; k < n_right; ++k) right.push_back(unvec(right_vec.segment(k * rows2, rows2), d2, d2) / alpha);
  for (auto& p : left) p = hermitian_part(alpha * p);
  for (auto& q : right) q = hermitian_part(q);

  const ProjectionOptions opts = projection_options(cfg);
  if (mode == CopyMode::kIdentical) {
    if (n_left != n_right || d1 != d2) throw ConfigError("identical QDT needs matching detector shapes");
    std::vector<CMatrix> avg;
    for (int l = 0; l < n_left; ++l) avg.push_back(0.5 * (left[static_cast<std::size_t>(l)] + right[static_cast<std::size_t>(l)]));
    result.intermediate = avg;
    PovmProjection p = project_povm(avg, opts);
    result.diagnostics.projection_iterations = p.iterations;
    result.povms.push_back(std::move(p.povm));
    return result;
  }
  result.intermediate = left;
  result.intermediate.insert(result.intermediate.end(), right.begin(), right.end());
  PovmProjection p = project_povm(left, opts);
  PovmProjection q = project_povm(right, opts);
  result.diagnostics.projection_iterations = p.iterations + q.iterations;
  result.povms.push_back(std::move(p.povm));
  result.povms.push_back(std::move(q.povm));
  return result;
}

TomographyResult estimate_qpt(const LinearModel& model, const EstimatorConfig& cfg, CopyMode mode,
                              const ProcessFlags& flags, const LinearInverter* prepared) {
  require_kind(model, TaskKind::kQpt, "estimate_qpt");
  std::unique_ptr<LinearInverter> owned;
  const LinearInverter& inv = inverter_for(model, cfg, prepared, owned);

  const int d1 = model.factor_dims[0], d2 = model.factor_dims[1];
  const Index s1 = static_cast<Index>(d1) * d1 * d1 * d1, s2 = static_cast<Index>(d2) * d2 * d2 * d2;

  TomographyResult result;
  result.kind = TaskKind::kQpt;
  result.mode = mode;
  result.diagnostics.design_rank = inv.rank();
  const CVector z = inv.solve(model.observation);
  result.diagnostics.inversion_residual = (model.design * z - model.observation).norm();

  // z = vec(X1) (x) vec(X2): its reshape is the rearranged Kronecker product.
  const CMatrix outer = unvec(z, s2, s1).transpose();
  const CMatrix joint = kron_unrearrange(outer, d1 * d1, d2 * d2);

  const ProjectionOptions opts = projection_options(cfg);
  if (mode == CopyMode::kIdentical) {
    if (d1 != d2) throw ConfigError("identical QPT needs equal dimensions");
    const bool tp = flags.first_tp && flags.second_tp;
    const double scale = tp ? d1 : std::sqrt(std::max(0.0, (joint.trace() + std::conj(joint.trace())).real() / 2.0));
    if (scale <= 0.0) throw DegenerateInputError("estimate_qpt: vanishing joint trace");
    KronFactors f = nearest_kron_factor(joint, d1 * d1, d2 * d2, KronNormalization::trace_sum(scale), cfg.degenerate_trace);
    result.diagnostics.factor_residual = f.residual;
    result.diagnostics.degenerate_factor = f.degenerate;
    const CMatrix x0 = 0.5 * (f.left + f.right.adjoint());
    const CMatrix xbar = trace_scaled_hermitian(x0, scale, cfg.degenerate_trace, "estimate_qpt");
    result.intermediate = {xbar};
    ProcessProjection p = project_process(xbar, tp, opts);
    result.diagnostics.projection_iterations = p.iterations;
    result.processes.push_back(std::move(p.process));
    return result;
  }

  KronNormalization norm;
  if (flags.first_tp) {
    norm = KronNormalization::trace_sum(d1);
  } else if (flags.second_tp) {
    norm = KronNormalization::right_trace(d2);
  } else {
    const std::optional<double> alpha = flags.alpha1 ? flags.alpha1 : model.scale_estimate;
    if (!alpha) {
      throw GaugeAmbiguityError("estimate_qpt: both channels are non trace preserving; "
                                "the split of scale between them needs alpha1");
    }
    norm = KronNormalization::trace_sum(d1 * *alpha);
  }
  KronFactors f = nearest_kron_factor(joint, d1 * d1, d2 * d2, norm, cfg.degenerate_trace);
  result.diagnostics.factor_residual = f.residual;
  result.diagnostics.degenerate_factor = f.degenerate;

  const CMatrix x1 = hermitian_part(f.left);
  const CMatrix x2 = flags.first_tp && flags.second_tp
                         ? trace_scaled_hermitian(f.right, d2, cfg.degenerate_trace, "estimate_qpt")
                         : hermitian_part(f.right);
  result.intermediate = {x1, x2};
  ProcessProjection p1 = project_process(x1, flags.first_tp, opts);
  ProcessProjection p2 = project_process(x2, flags.second_tp, opts);
  result.diagnostics.projection_iterations = p1.iterations + p2.iterations;
  result.processes.push_back(std::move(p1.process));
  result.processes.push_back(std::move(p2.process));
  return result;
}

}  // namespace ctomo
