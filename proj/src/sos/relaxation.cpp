#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ctomo/sos.hpp"

namespace ctomo {

namespace {

int half_degree(const Polynomial& p) { return std::max(0, (p.degree() + 1) / 2); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void monomials_of_degree(int n, int degree, Exponents& cur, int pos, std::vector<Exponents>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = degree;
    out.push_back(cur);
    return;
  }
  for (int a = degree; a >= 0; --a) {
    cur[static_cast<std::size_t>(pos)] = a;
    monomials_of_degree(n, degree - a, cur, pos + 1, out);
  }
}

std::vector<Exponents> graded_monomials(int n, int max_degree) {
  std::vector<Exponents> out{Exponents(static_cast<std::size_t>(n), 0)};
  if (n == 0) return out;
  for (int k = 1; k <= max_degree; ++k) {
    Exponents cur(static_cast<std::size_t>(n), 0);
    monomials_of_degree(n, k, cur, 0, out);
  }
  return out;
}

Exponents add(const Exponents& a, const Exponents& b) {
  Exponents r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

struct AffineReduction {
  RVector shift;
  RMatrix map;
};

// Solves the affine equalities for as many late variables as possible.
AffineReduction eliminate_affine(const SemialgebraicProgram& p, std::vector<bool>& is_affine) {
  const int n = p.num_vars;
  std::vector<RVector> rows;
  std::vector<double> rhs;
  is_affine.assign(p.equalities.size(), false);
  for (std::size_t k = 0; k < p.equalities.size(); ++k) {
    const Polynomial& h = p.equalities[k];
    if (h.degree() > 1) continue;
    is_affine[k] = true;
    RVector a = RVector::Zero(n);
    for (const auto& [e, c] : h.terms()) {
      for (int i = 0; i < n; ++i)
        if (e[static_cast<std::size_t>(i)] == 1) a(i) = c;
    }
    rows.push_back(a);
    rhs.push_back(-h.constant_term());
  }
  RMatrix e(static_cast<Index>(rows.size()), n + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    e.row(static_cast<Index>(r)).head(n) = rows[r].transpose();
    e(static_cast<Index>(r), n) = rhs[r];
  }
  const double scale = rows.empty() ? 1.0 : std::max(1.0, e.leftCols(n).cwiseAbs().maxCoeff());
  std::vector<int> pivot_row(static_cast<std::size_t>(n), -1);
  Index next = 0;
  for (int col = n - 1; col >= 0 && next < e.rows(); --col) {
    Index best = -1;
    double best_val = 1e-10 * scale;
    for (Index r = next; r < e.rows(); ++r)
      if (std::abs(e(r, col)) > best_val) {
        best_val = std::abs(e(r, col));
        best = r;
      }
    if (best < 0) continue;
    e.row(next).swap(e.row(best));
    e.row(next) /= e(next, col);
    for (Index r = 0; r < e.rows(); ++r)
      if (r != next && e(r, col) != 0.0) e.row(r) -= e(r, col) * e.row(next);
    pivot_row[static_cast<std::size_t>(col)] = static_cast<int>(next);
    ++next;
  }
  for (Index r = next; r < e.rows(); ++r)
    if (std::abs(e(r, n)) > 1e-9 * scale) throw ConfigError("lasserre_relaxation: inconsistent affine equalities");

  std::vector<int> free_vars;
  for (int i = 0; i < n; ++i)
    if (pivot_row[static_cast<std::size_t>(i)] < 0) free_vars.push_back(i);
  AffineReduction out{RVector::Zero(n), RMatrix::Zero(n, static_cast<Index>(free_vars.size()))};
  for (std::size_t f = 0; f < free_vars.size(); ++f) out.map(free_vars[f], static_cast<Index>(f)) = 1.0;
  for (int i = 0; i < n; ++i) {
    const int r = pivot_row[static_cast<std::size_t>(i)];
    if (r < 0) continue;
    out.shift(i) = e(r, n);
    for (std::size_t f = 0; f < free_vars.size(); ++f) out.map(i, static_cast<Index>(f)) = -e(r, free_vars[f]);
  }
  return out;
}

}  // namespace

int minimal_order(const SemialgebraicProgram& p) {
  int r = std::max(1, half_degree(p.objective));
  for (const auto& h : p.equalities) r = std::max(r, half_degree(h));
  for (const auto& g : p.inequalities) r = std::max(r, half_degree(g));
  return r;
}

Relaxation lasserre_relaxation(const SemialgebraicProgram& p, int order, const RelaxationOptions& opts) {
  p.validate();
  const int needed = minimal_order(p);
  if (order == 0) order = needed;
  if (order < needed) {
    throw ConfigError("lasserre_relaxation: order " + std::to_string(order) + " is below the required " +
                      std::to_string(needed));
  }
  Relaxation r;
  r.order = order;

  std::vector<bool> is_affine;
  AffineReduction red = eliminate_affine(p, is_affine);
  r.shift = red.shift;
  r.map = red.map;
  const int nz = static_cast<int>(red.map.cols());

  const double count = binomial(nz + 2 * order, 2 * order);
  if (count > static_cast<double>(opts.max_moments)) {
    throw SizeLimitError("lasserre_relaxation: order " + std::to_string(order) + " in " + std::to_string(nz) +
                         " variables needs " + std::to_string(static_cast<long long>(count)) + " moments (moment matrix side " +
                         std::to_string(static_cast<long long>(binomial(nz + order, order))) + "), above the limit of " +
                         std::to_string(opts.max_moments));
  }

  std::vector<Polynomial> subs;
  for (int i = 0; i < p.num_vars; ++i) {
    Polynomial s = Polynomial::constant(nz, red.shift(i));
    for (int f = 0; f < nz; ++f)
      if (red.map(i, f) != 0.0) s += red.map(i, f) * Polynomial::variable(nz, f);
    subs.push_back(std::move(s));
  }
  r.reduced_objective = p.objective.substitute(subs).pruned(1e-15);
  std::vector<Polynomial> ineqs;
  for (const auto& g : p.inequalities) {
    Polynomial gz = g.substitute(subs).pruned(1e-15);
    if (gz.degree() <= 0) {
      if (gz.constant_term() < -1e-9) throw ConfigError("lasserre_relaxation: an inequality is infeasible");
      continue;
    }
    ineqs.push_back(std::move(gz));
  }
  for (std::size_t k = 0; k < p.equalities.size(); ++k) {
    if (is_affine[k]) continue;
    Polynomial hz = p.equalities[k].substitute(subs).pruned(1e-15);
    if (hz.degree() <= 0) {
      if (std::abs(hz.constant_term()) > 1e-9) throw ConfigError("lasserre_relaxation: an equality is infeasible");
      continue;
    }
    r.nonlinear_equalities.push_back(std::move(hz));
  }

  r.moments = graded_monomials(nz, 2 * order);
  for (std::size_t i = 0; i < r.moments.size(); ++i) r.moment_index[r.moments[i]] = static_cast<int>(i);
  const int nm = static_cast<int>(r.moments.size());

  // Moment and localizing blocks.
  auto add_block = [&](const Polynomial& weight, int basis_degree) {
    const int b = static_cast<int>(r.block_weights.size());
    const std::size_t size = static_cast<std::size_t>(binomial(nz + basis_degree, basis_degree) + 0.5);
    std::vector<Exponents> basis(r.moments.begin(), r.moments.begin() + static_cast<long>(size));
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i; j < basis.size(); ++j) {
        const Exponents base = add(basis[i], basis[j]);
        for (const auto& [e, c] : weight.terms()) {
          r.entries.push_back({b, static_cast<int>(i), static_cast<int>(j), r.moment_index.at(add(base, e)), c});
        }
      }
    r.block_weights.push_back(weight);
    r.block_bases.push_back(std::move(basis));
    r.sdp.block_sizes.push_back(static_cast<int>(size));
  };
  add_block(Polynomial::constant(nz, 1.0), order);
  for (const auto& g : ineqs) add_block(g, order - half_degree(g));

  // Linear conditions on y: y_0 = 1 and L(h m) = 0.
  std::vector<std::vector<std::pair<int, double>>> conditions;
  std::vector<double> cond_rhs;
  conditions.push_back({{0, 1.0}});
  cond_rhs.push_back(1.0);
  for (const auto& h : r.nonlinear_equalities) {
    const int deg = 2 * order - h.degree();
    const std::size_t count_m = static_cast<std::size_t>(binomial(nz + deg, deg) + 0.5);
    for (std::size_t mi = 0; mi < count_m; ++mi) {
      std::map<int, double> row;
      for (const auto& [e, c] : h.terms()) row[r.moment_index.at(add(e, r.moments[mi]))] += c;
      conditions.emplace_back(row.begin(), row.end());
      cond_rhs.push_back(0.0);
    }
  }

  r.particular = RVector::Zero(nm);
  std::vector<Eigen::Triplet<double>> triplets;
  int free_count = 0;
  if (conditions.size() == 1) {
    r.particular(0) = 1.0;
    for (int a = 1; a < nm; ++a) triplets.emplace_back(a, free_count++, 1.0);
  } else {
    // Dense RREF pivoting on the highest-degree moments first.
    RMatrix e = RMatrix::Zero(static_cast<Index>(conditions.size()), nm + 1);
    for (std::size_t k = 0; k < conditions.size(); ++k) {
      for (const auto& [a, c] : conditions[k]) e(static_cast<Index>(k), a) += c;
      e(static_cast<Index>(k), nm) = cond_rhs[k];
    }
    const double scale = std::max(1.0, e.leftCols(nm).cwiseAbs().maxCoeff());
    std::vector<int> pivot_row(static_cast<std::size_t>(nm), -1);
    Index next = 0;
    for (int col = nm - 1; col >= 0 && next < e.rows(); --col) {
      Index best = -1;
      double best_val = 1e-10 * scale;
      for (Index k = next; k < e.rows(); ++k)
        if (std::abs(e(k, col)) > best_val) {
          best_val = std::abs(e(k, col));
          best = k;
        }
      if (best < 0) continue;
      e.row(next).swap(e.row(best));
      e.row(next) /= e(next, col);
      for (Index k = 0; k < e.rows(); ++k)
        if (k != next && e(k, col) != 0.0) e.row(k) -= e(k, col) * e.row(next);
      pivot_row[static_cast<std::size_t>(col)] = static_cast<int>(next);
      ++next;
    }
    for (Index k = next; k < e.rows(); ++k)
      if (std::abs(e(k, nm)) > 1e-9 * scale) throw ConfigError("lasserre_relaxation: inconsistent moment conditions");
    std::vector<int> free_of(static_cast<std::size_t>(nm), -1);
    for (int a = 0; a < nm; ++a)
      if (pivot_row[static_cast<std::size_t>(a)] < 0) {
        free_of[static_cast<std::size_t>(a)] = free_count;
        triplets.emplace_back(a, free_count++, 1.0);
      }
    for (int a = 0; a < nm; ++a) {
      const int row = pivot_row[static_cast<std::size_t>(a)];
      if (row < 0) continue;
      r.particular(a) = e(row, nm);
      for (int f = 0; f < nm; ++f) {
        const int k = free_of[static_cast<std::size_t>(f)];
        if (k >= 0 && std::abs(e(row, f)) > 1e-14) triplets.emplace_back(a, k, -e(row, f));
      }
    }
  }
  r.null_space.resize(nm, free_count);
  r.null_space.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::SparseMatrix<double, Eigen::RowMajor> by_moment(r.null_space);

  // Objective over the moments.
  r.objective_coefficients = RVector::Zero(nm);
  for (const auto& [e, c] : r.reduced_objective.terms()) r.objective_coefficients(r.moment_index.at(e)) = c;
  r.objective_norm = r.reduced_objective.coefficient_norm();
  r.objective_scale = std::max(r.reduced_objective.max_abs_coefficient(), 1e-300);
  r.objective_coefficients /= r.objective_scale;

  // SDP in the standard form: C = F(y_p), A_k = -F(N_k), b = -N^T f.
  for (int s : r.sdp.block_sizes) r.sdp.c.push_back(RMatrix::Zero(s, s));
  r.sdp.a.assign(static_cast<std::size_t>(free_count), {});
  for (const auto& en : r.entries) {
    const double yp = r.particular(en.moment);
    if (yp != 0.0) {
      RMatrix& c = r.sdp.c[static_cast<std::size_t>(en.block)];
      c(en.row, en.col) += en.coefficient * yp;
      if (en.row != en.col) c(en.col, en.row) += en.coefficient * yp;
    }
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(by_moment, en.moment); it; ++it) {
      r.sdp.a[static_cast<std::size_t>(it.col())].push_back({en.block, en.row, en.col, -en.coefficient * it.value()});
    }
  }
  r.sdp.b = -(r.null_space.transpose() * r.objective_coefficients);
  return r;
}

double relaxation_bound(const Relaxation& r, const SdpSolution& s) {
  return r.objective_scale * (r.objective_coefficients.dot(r.particular) - s.primal_objective);
}

Extraction extract_candidate(const Relaxation& r, const SdpSolution& s, double threshold) {
  Extraction out;
  const int nz = r.reduced_vars();
  if (s.y.size() != r.null_space.cols()) return out;
  const RVector y = r.particular + r.null_space * s.y;
  if (nz == 0) {
    out.ratio = std::numeric_limits<double>::infinity();
    out.point = r.shift;
    return out;
  }
  const auto& basis = r.block_bases.front();
  RMatrix moment(static_cast<Index>(basis.size()), static_cast<Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const double v = y(r.moment_index.at(add(basis[i], basis[j])));
      moment(static_cast<Index>(i), static_cast<Index>(j)) = v;
      moment(static_cast<Index>(j), static_cast<Index>(i)) = v;
    }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(moment, Eigen::EigenvaluesOnly);
  const RVector ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  const double second = std::max(ev(ev.size() - 2), 0.0);
  out.ratio = second > 0.0 ? top / second : std::numeric_limits<double>::infinity();
  if (top <= 0.0 || out.ratio <= threshold) return out;
  RVector z(nz);
  for (int i = 0; i < nz; ++i) {
    Exponents e(static_cast<std::size_t>(nz), 0);
    e[static_cast<std::size_t>(i)] = 1;
    z(i) = y(r.moment_index.at(e)) / y(0);
  }
  out.point = r.shift + r.map * z;
  return out;
}

double certificate_residual(const Relaxation& r, const SdpSolution& s, double gamma) {
  const Index nm = static_cast<Index>(r.moments.size());
  RVector res = r.objective_coefficients;
  res(0) -= gamma / r.objective_scale;
  for (const auto& en : r.entries) {
    const RMatrix& x = s.x[static_cast<std::size_t>(en.block)];
    res(en.moment) -= en.coefficient * (en.row == en.col ? x(en.row, en.row) : 2.0 * x(en.row, en.col));
  }
  if (!r.nonlinear_equalities.empty()) {
    // Remove the part explained by multiples of the equalities.
    const int nz = r.reduced_vars();
    std::vector<RVector> cols;
    for (const auto& h : r.nonlinear_equalities) {
      const int deg = 2 * r.order - h.degree();
      const std::size_t count_m = static_cast<std::size_t>(binomial(nz + deg, deg) + 0.5);
      for (std::size_t mi = 0; mi < count_m; ++mi) {
        RVector c = RVector::Zero(nm);
        for (const auto& [e, v] : h.terms()) c(r.moment_index.at(add(e, r.moments[mi]))) += v;
        cols.push_back(std::move(c));
      }
    }
    RMatrix h(nm, static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) h.col(static_cast<Index>(k)) = cols[k];
    const RVector lambda = h.colPivHouseholderQr().solve(res);
    res -= h * lambda;
  }
  const double norm = r.objective_norm > 0.0 ? r.objective_norm : 1.0;
  return r.objective_scale * res.norm() / norm;
}

}  // namespace ctomo
