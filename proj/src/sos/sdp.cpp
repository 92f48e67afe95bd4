#include "ctomo/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ctomo {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kMaxIterations: return "max_iter";
    case SdpStatus::kInfeasible: return "infeasible";
    case SdpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (c.size() != block_sizes.size()) throw DimensionError("SdpProblem: one C block per block size");
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (block_sizes[j] < 1 || c[j].rows() != block_sizes[j] || c[j].cols() != block_sizes[j]) {
      throw DimensionError("SdpProblem: C block " + std::to_string(j) + " has the wrong size");
    }
    if ((c[j] - c[j].transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c[j].cwiseAbs().maxCoeff())) {
      throw DimensionError("SdpProblem: C block " + std::to_string(j) + " is not symmetric");
    }
  }
  if (b.size() != static_cast<Index>(a.size())) throw DimensionError("SdpProblem: b length differs from constraint count");
  for (std::size_t k = 0; k < a.size(); ++k)
    for (const auto& e : a[k]) {
      if (e.block < 0 || e.block >= static_cast<int>(block_sizes.size()) || e.row < 0 || e.row > e.col ||
          e.col >= block_sizes[static_cast<std::size_t>(e.block)]) {
        throw DimensionError("SdpProblem: constraint " + std::to_string(k) + " has an entry out of range");
      }
    }
}

namespace {

using Blocks = std::vector<RMatrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j].cwiseProduct(b[j]).sum();
  return s;
}

double norm(const Blocks& a) { return std::sqrt(inner(a, a)); }

struct Layout {
  // Per block, the constraints with entries there and those entries.
  struct Part {
    int constraint;
    std::vector<SdpEntry> entries;
    std::vector<int> rows;  // distinct indices touched
  };
  std::vector<std::vector<Part>> blocks;
};

Layout layout_of(const SdpProblem& p) {
  Layout l;
  l.blocks.resize(p.block_sizes.size());
  for (int k = 0; k < p.constraints(); ++k) {
    std::vector<std::vector<SdpEntry>> per(p.block_sizes.size());
    for (const auto& e : p.a[static_cast<std::size_t>(k)]) per[static_cast<std::size_t>(e.block)].push_back(e);
    for (std::size_t j = 0; j < per.size(); ++j) {
      if (per[j].empty()) continue;
      Layout::Part part{k, per[j], {}};
      for (const auto& e : per[j]) {
        part.rows.push_back(e.row);
        part.rows.push_back(e.col);
      }
      std::sort(part.rows.begin(), part.rows.end());
      part.rows.erase(std::unique(part.rows.begin(), part.rows.end()), part.rows.end());
      l.blocks[j].push_back(std::move(part));
    }
  }
  return l;
}

double apply_entries(const std::vector<SdpEntry>& entries, const RMatrix& w) {
  double s = 0.0;
  for (const auto& e : entries) s += e.row == e.col ? e.value * w(e.row, e.row) : e.value * (w(e.row, e.col) + w(e.col, e.row));
  return s;
}

RVector apply(const SdpProblem& p, const Layout& l, const Blocks& w) {
  RVector out = RVector::Zero(p.constraints());
  for (std::size_t j = 0; j < l.blocks.size(); ++j)
    for (const auto& part : l.blocks[j]) out(part.constraint) += apply_entries(part.entries, w[j]);
  return out;
}

Blocks adjoint(const SdpProblem& p, const RVector& y) {
  Blocks out;
  for (int n : p.block_sizes) out.push_back(RMatrix::Zero(n, n));
  for (int k = 0; k < p.constraints(); ++k) {
    const double v = y(k);
    if (v == 0.0) continue;
    for (const auto& e : p.a[static_cast<std::size_t>(k)]) {
      RMatrix& m = out[static_cast<std::size_t>(e.block)];
      m(e.row, e.col) += v * e.value;
      if (e.row != e.col) m(e.col, e.row) += v * e.value;
    }
  }
  return out;
}

// Largest alpha in (0, 1] keeping x + alpha dx PSD, scaled by the step fraction.
double step_length(const Blocks& x, const Blocks& dx, double fraction, bool& ok) {
  double alpha = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    Eigen::LLT<RMatrix> llt(x[j]);
    if (llt.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    const RMatrix linv_dx = llt.matrixL().solve(dx[j]);
    const RMatrix s = llt.matrixL().solve(linv_dx.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es((s + s.transpose()) / 2.0, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -fraction / lmin);
  }
  return alpha;
}

struct Direction {
  Blocks dx, dz;
  RVector dy;
};

}  // namespace

RVector sdp_apply(const SdpProblem& p, const std::vector<RMatrix>& x) { return apply(p, layout_of(p), x); }

SdpSolution sdp_solve(const SdpProblem& p, const SdpOptions& opts) {
  p.validate();
  const Layout layout = layout_of(p);
  const int m = p.constraints();
  const std::size_t nb = p.block_sizes.size();
  int n_total = 0;
  for (int n : p.block_sizes) n_total += n;

  // Starting point scaled to the data.
  double a_max = 0.0;
  std::vector<double> a_norm(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    double s = 0.0;
    for (const auto& e : p.a[static_cast<std::size_t>(k)]) s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    a_norm[static_cast<std::size_t>(k)] = std::sqrt(s);
    a_max = std::max(a_max, a_norm[static_cast<std::size_t>(k)]);
  }
  const double c_norm = norm(p.c);
  const double b_norm = p.b.norm();
  SdpSolution sol;
  sol.y = RVector::Zero(m);
  for (int n : p.block_sizes) {
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    for (int k = 0; k < m; ++k)
      xi = std::max(xi, std::sqrt(static_cast<double>(n)) * (1.0 + std::abs(p.b(k))) / (1.0 + a_norm[static_cast<std::size_t>(k)]));
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), a_max, c_norm});
    sol.x.push_back(xi * RMatrix::Identity(n, n));
    sol.z.push_back(eta * RMatrix::Identity(n, n));
  }

  std::optional<SdpSolution> best;
  double best_xz = 0.0;
  int refinements = 0;
  auto failed = [&](SdpStatus status) {
    if (best) return *best;
    sol.status = status;
    return sol;
  };
  for (sol.iterations = 0; sol.iterations <= opts.max_iterations; ++sol.iterations) {
    Blocks& x = sol.x;
    Blocks& z = sol.z;
    RVector& y = sol.y;
    const RVector rp = p.b - apply(p, layout, x);
    Blocks rd = adjoint(p, y);
    for (std::size_t j = 0; j < nb; ++j) rd[j] = p.c[j] - z[j] - rd[j];
    sol.primal_objective = inner(p.c, x);
    sol.dual_objective = p.b.dot(y);
    sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                       (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    sol.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    sol.dual_infeasibility = norm(rd) / (1.0 + c_norm);
    const double mu = inner(x, z) / n_total;
    const double complementarity = inner(x, z) / (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    const bool converged = sol.relative_gap < opts.tolerance && complementarity < opts.tolerance &&
                           sol.primal_infeasibility < opts.tolerance && sol.dual_infeasibility < opts.tolerance;
    if (converged) {
      // A few extra steps drive X Z towards zero; stop once they stall.
      double xz = 0.0;
      for (std::size_t j = 0; j < nb; ++j) xz += (x[j] * z[j]).squaredNorm();
      xz = std::sqrt(xz);
      if (best && xz >= best_xz) return *best;
      sol.status = SdpStatus::kOptimal;
      if (xz < 1e-3 * opts.tolerance || refinements >= 8 || sol.iterations == opts.max_iterations) return sol;
      best = sol;
      best_xz = xz;
      ++refinements;
    } else if (best) {
      return *best;
    }
    if (sol.iterations == opts.max_iterations) break;
    if (norm(x) > opts.divergence || norm(z) > opts.divergence || y.norm() > opts.divergence) {
      return failed(SdpStatus::kInfeasible);
    }

    Blocks zinv(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      Eigen::LLT<RMatrix> llt(z[j]);
      if (llt.info() != Eigen::Success) {
        return failed(SdpStatus::kNumericalFailure);
      }
      zinv[j] = llt.solve(RMatrix::Identity(z[j].rows(), z[j].cols()));
      zinv[j] = (zinv[j] + zinv[j].transpose()).eval() / 2.0;
    }

    // Schur complement M_kl = sum_j Tr(A_k X A_l Z^-1).
    RMatrix schur = RMatrix::Zero(m, m);
    for (std::size_t j = 0; j < nb; ++j) {
      const Index n = p.block_sizes[j];
      for (const auto& part_l : layout.blocks[j]) {
        RMatrix t = RMatrix::Zero(static_cast<Index>(part_l.rows.size()), n);
        auto local = [&](int r) {
          return static_cast<Index>(std::lower_bound(part_l.rows.begin(), part_l.rows.end(), r) - part_l.rows.begin());
        };
        for (const auto& e : part_l.entries) {
          t.row(local(e.row)) += e.value * zinv[j].row(e.col);
          if (e.row != e.col) t.row(local(e.col)) += e.value * zinv[j].row(e.row);
        }
        RMatrix xcols(n, static_cast<Index>(part_l.rows.size()));
        for (std::size_t i = 0; i < part_l.rows.size(); ++i) xcols.col(static_cast<Index>(i)) = x[j].col(part_l.rows[i]);
        const RMatrix w = xcols * t;
        for (const auto& part_k : layout.blocks[j]) schur(part_k.constraint, part_l.constraint) += apply_entries(part_k.entries, w);
      }
    }
    schur = (schur + schur.transpose()).eval() / 2.0;
    Eigen::LLT<RMatrix> schur_llt(schur);
    Eigen::LDLT<RMatrix> schur_ldlt;
    const bool use_llt = schur_llt.info() == Eigen::Success;
    if (!use_llt) {
      schur_ldlt.compute(schur);
      if (schur_ldlt.info() != Eigen::Success) {
        return failed(SdpStatus::kNumericalFailure);
      }
    }

    // Direction for a given target G with dX = G - sym(X dZ Z^-1).
    const RVector a_x_rd_zinv = [&] {
      Blocks w(nb);
      for (std::size_t j = 0; j < nb; ++j) w[j] = x[j] * rd[j] * zinv[j];
      return apply(p, layout, w);
    }();
    auto direction = [&](const Blocks& g) {
      Direction d;
      const RVector rhs = rp - apply(p, layout, g) + a_x_rd_zinv;
      d.dy = use_llt ? RVector(schur_llt.solve(rhs)) : RVector(schur_ldlt.solve(rhs));
      d.dz = adjoint(p, d.dy);
      for (std::size_t j = 0; j < nb; ++j) d.dz[j] = rd[j] - d.dz[j];
      d.dx.resize(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        const RMatrix prod = x[j] * d.dz[j] * zinv[j];
        d.dx[j] = g[j] - (prod + prod.transpose()) / 2.0;
      }
      // Refinement: the direction should meet A(dX) = rp to working precision.
      for (int pass = 0; pass < 2; ++pass) {
        const RVector r = rp - apply(p, layout, d.dx);
        if (r.norm() <= 1e-15 * (1.0 + rp.norm())) break;
        const RVector dy = use_llt ? RVector(schur_llt.solve(r)) : RVector(schur_ldlt.solve(r));
        const Blocks adj = adjoint(p, dy);
        d.dy += dy;
        for (std::size_t j = 0; j < nb; ++j) {
          d.dz[j] -= adj[j];
          const RMatrix prod = x[j] * adj[j] * zinv[j];
          d.dx[j] += (prod + prod.transpose()) / 2.0;
        }
      }
      return d;
    };

    Blocks g(nb);
    for (std::size_t j = 0; j < nb; ++j) g[j] = -x[j];
    const Direction pred = direction(g);
    bool ok = true;
    const double ap = step_length(x, pred.dx, 1.0, ok);
    const double ad = step_length(z, pred.dz, 1.0, ok);
    if (!ok) {
      return failed(SdpStatus::kNumericalFailure);
    }
    Blocks xa = x, za = z;
    for (std::size_t j = 0; j < nb; ++j) {
      xa[j] += ap * pred.dx[j];
      za[j] += ad * pred.dz[j];
    }
    const double mu_aff = std::max(0.0, inner(xa, za)) / n_total;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), opts.min_centering, 1.0);

    for (std::size_t j = 0; j < nb; ++j) {
      const RMatrix corr = pred.dx[j] * pred.dz[j] * zinv[j];
      g[j] = sigma * mu * zinv[j] - x[j] - (corr + corr.transpose()) / 2.0;
    }
    const Direction d = direction(g);
    const double sp = step_length(x, d.dx, opts.step_fraction, ok);
    const double sd = step_length(z, d.dz, opts.step_fraction, ok);
    if (!ok) {
      return failed(SdpStatus::kNumericalFailure);
    }
    for (std::size_t j = 0; j < nb; ++j) {
      x[j] += sp * d.dx[j];
      z[j] += sd * d.dz[j];
      x[j] = (x[j] + x[j].transpose()).eval() / 2.0;
      z[j] = (z[j] + z[j].transpose()).eval() / 2.0;
    }
    y += sd * d.dy;
  }
  if (best) return *best;
  sol.iterations = opts.max_iterations;
  sol.status = SdpStatus::kMaxIterations;
  return sol;
}

}  // namespace ctomo
