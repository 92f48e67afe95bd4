#include <cmath>
#include <string>

#include "ctomo/estimators.hpp"

namespace ctomo {

EstimatorConfig EstimatorConfig::defaults_for(TaskKind kind) {
  EstimatorConfig cfg;
  cfg.inversion = kind == TaskKind::kQst ? Inversion::kTraceConstrained : Inversion::kPlainLs;
  return cfg;
}

namespace {

void require_full_rank(const CMatrix& a, double tol, const char* what) {
  const long r = static_cast<long>(numerical_rank(a, tol));
  if (r < a.cols()) {
    throw RankError(std::string(what) + ": design has rank " + std::to_string(r) + " < " +
                        std::to_string(a.cols()) + "; use mp_inverse or regularized inversion",
                    r, static_cast<long>(a.cols()));
  }
}

}  // namespace

LinearInverter::LinearInverter(const CMatrix& design, const EstimatorConfig& cfg,
                               std::optional<double> fixed_first)
    : fixed_first_(fixed_first) {
  real_ = design.imag().isZero(0.0);
  rank_ = static_cast<long>(numerical_rank(design, cfg.rank_tolerance));
  switch (cfg.inversion) {
    case Inversion::kPlainLs:
      require_full_rank(design, cfg.rank_tolerance, "plain least squares");
      solve_matrix_ = pseudo_inverse(design, cfg.rank_tolerance);
      break;
    case Inversion::kMpInverse:
      solve_matrix_ = pseudo_inverse(design, cfg.rank_tolerance);
      break;
    case Inversion::kRegularized: {
      const Index n = design.cols();
      CMatrix d;
      if (cfg.regularization) {
        if (cfg.regularization->rows() != n || cfg.regularization->cols() != n) {
          throw DimensionError("regularized inversion: D must be " + std::to_string(n) + "x" +
                               std::to_string(n));
        }
        d = cfg.regularization->cast<Complex>();
      } else {
        d = cfg.regularization_scale * CMatrix::Identity(n, n);
      }
      if (min_eigenvalue(d) < -1e-12) throw ConfigError("regularized inversion: D is not PSD");
      const CMatrix normal = design.adjoint() * design + d;
      solve_matrix_ = normal.completeOrthogonalDecomposition().solve(design.adjoint());
      break;
    }
    case Inversion::kTraceConstrained: {
      if (!fixed_first_) throw ConfigError("trace_constrained inversion needs the fixed first coordinate");
      const CMatrix rest = design.rightCols(design.cols() - 1);
      require_full_rank(rest, cfg.rank_tolerance, "trace-constrained least squares");
      solve_matrix_ = pseudo_inverse(rest, cfg.rank_tolerance);
      first_column_ = design.col(0);
      break;
    }
  }
  if (cfg.inversion != Inversion::kTraceConstrained) fixed_first_.reset();
}

CVector LinearInverter::solve(const CVector& y) const {
  CVector x;
  if (fixed_first_) {
    const CVector rest = solve_matrix_ * (y - *fixed_first_ * first_column_);
    x.resize(rest.size() + 1);
    x(0) = *fixed_first_;
    x.tail(rest.size()) = rest;
  } else {
    x = solve_matrix_ * y;
  }
  if (real_ && y.imag().isZero(0.0)) x = x.real().cast<Complex>();
  return x;
}

CVector linear_inversion(const LinearModel& model, const EstimatorConfig& cfg) {
  model.validate();
  std::optional<double> fixed;
  if (cfg.inversion == Inversion::kTraceConstrained) {
    if (model.kind != TaskKind::kQst) throw ConfigError("trace_constrained inversion applies to QST models");
    fixed = 1.0 / std::sqrt(static_cast<double>(model.total_dim()));
  }
  LinearInverter inv(model.design, cfg, fixed);
  if (model.kind != TaskKind::kQdt) return inv.solve(model.observation);
  // One solve per outcome pair, concatenated in the same block order.
  const Index m = model.design.rows();
  const Index n = model.design.cols();
  CVector out(n * model.blocks());
  for (int b = 0; b < model.blocks(); ++b) out.segment(b * n, n) = inv.solve(model.observation.segment(b * m, m));
  return out;
}

}  // namespace ctomo
