#include <algorithm>
#include <cmath>
#include <string>

#include "ctomo/sos.hpp"

namespace ctomo {

namespace {

using Kind = VariableBlock::Kind;

constexpr double kFeasible = 1e-10;

// Minimum-norm Newton corrections on the equalities and violated inequalities.
void correct_constraints(const SemialgebraicProgram& p, RVector& x) {
  for (int it = 0; it < 50; ++it) {
    std::vector<RVector> grads;
    std::vector<double> values;
    for (const auto& h : p.equalities) {
      values.push_back(h.evaluate(x));
      grads.push_back(h.gradient(x));
    }
    for (const auto& g : p.inequalities) {
      const double v = g.evaluate(x);
      if (v < 0.0) {
        values.push_back(v);
        grads.push_back(g.gradient(x));
      }
    }
    double worst = 0.0;
    for (double v : values) worst = std::max(worst, std::abs(v));
    if (worst < 1e-13) return;
    RMatrix j(static_cast<Index>(grads.size()), x.size());
    RVector r(static_cast<Index>(values.size()));
    for (std::size_t k = 0; k < grads.size(); ++k) {
      j.row(static_cast<Index>(k)) = grads[k].transpose();
      r(static_cast<Index>(k)) = values[k];
    }
    const RVector step = j.completeOrthogonalDecomposition().solve(r);
    if (!step.allFinite() || step.norm() < 1e-16) return;
    x -= step;
  }
}

void project_block(const VariableBlock& b, RVector& x) {
  auto seg = x.segment(b.offset, b.size);
  switch (b.kind) {
    case Kind::kState: {
      const HermitianBasis gm = gell_mann_basis(b.dim);
      RVector theta(b.size + 1);
      theta << 1.0 / std::sqrt(static_cast<double>(b.dim)), seg;
      const QuantumState s = project_state(deparameterize(ParamVector{theta}, gm));
      seg = parameterize(s.matrix(), gm).values.tail(b.size);
      break;
    }
    case Kind::kPovm: {
      const HermitianBasis gm = gell_mann_basis(b.dim);
      const int dd = b.dim * b.dim;
      std::vector<CMatrix> elems;
      for (int l = 0; l < b.outcomes; ++l) elems.push_back(deparameterize(ParamVector{RVector(seg.segment(l * dd, dd))}, gm));
      try {
        const PovmProjection proj = project_povm(elems);
        for (int l = 0; l < b.outcomes; ++l) seg.segment(l * dd, dd) = parameterize(proj.povm[static_cast<std::size_t>(l)], gm).values;
      } catch (const ProjectionFailure&) {
        // Left to the constraint correction.
      }
      break;
    }
    case Kind::kProcess: {
      const HermitianBasis gm = gell_mann_basis(b.dim * b.dim);
      try {
        const ProcessProjection proj = project_process(deparameterize(ParamVector{RVector(seg)}, gm), b.trace_preserving);
        seg = parameterize(proj.process.matrix(), gm).values;
      } catch (const ProjectionFailure&) {
      }
      break;
    }
    case Kind::kFamily: seg = seg.cwiseMax(b.lower).cwiseMin(b.upper); break;
    case Kind::kPureVector: {
      const double n = seg.norm();
      if (n > 0.0) {
        seg /= n;
      } else {
        seg.setZero();
        seg(0) = 1.0;
      }
      break;
    }
    case Kind::kUnitary: {
      const int dd = b.dim * b.dim;
      CMatrix g(b.dim, b.dim);
      for (int k = 0; k < dd; ++k) g(k / b.dim, k % b.dim) = Complex(seg(k), seg(dd + k));
      const CMatrix u = polar_unitary(g);
      for (int k = 0; k < dd; ++k) {
        seg(k) = u(k / b.dim, k % b.dim).real();
        seg(dd + k) = u(k / b.dim, k % b.dim).imag();
      }
      break;
    }
  }
}

}  // namespace

RVector project_to_program(const SemialgebraicProgram& p, const RVector& x) {
  if (x.size() != p.num_vars) throw DimensionError("project_to_program: point has the wrong length");
  RVector y = x;
  for (const auto& b : p.blocks) project_block(b, y);
  if (p.violation(y) > kFeasible) correct_constraints(p, y);
  return y;
}

PolishResult local_polish(const SemialgebraicProgram& p, const RVector& start, const PolishOptions& opts) {
  if (start.size() != p.num_vars) throw DimensionError("local_polish: start has the wrong length");
  if (!start.allFinite()) throw InfeasibleStartError("local_polish: start is not finite");
  PolishResult out;
  out.point = project_to_program(p, start);
  const double distance = (out.point - start).norm();
  if (distance > opts.recovery_distance || p.violation(out.point) > 1e-6) {
    throw InfeasibleStartError("local_polish: start is " + std::to_string(distance) +
                               " from the feasible set (recovery distance " + std::to_string(opts.recovery_distance) + ")");
  }
  out.cost = p.cost(out.point);
  RVector grad = p.objective.gradient(out.point);
  double alpha = 1.0;
  for (out.iterations = 1; out.iterations <= opts.max_iterations; ++out.iterations) {
    RVector next;
    double next_cost = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      next = project_to_program(p, out.point - alpha * grad);
      next_cost = p.cost(next);
      if (next_cost <= out.cost + 1e-4 * grad.dot(next - out.point)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const RVector s = next - out.point;
    const RVector next_grad = p.objective.gradient(next);
    out.point = next;
    out.cost = next_cost;
    if (s.norm() < opts.step_tolerance) break;
    const double sy = s.dot(next_grad - grad);
    alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : std::min(alpha * 2.0, 1e12);
    grad = next_grad;
  }
  out.iterations = std::min(out.iterations, opts.max_iterations);
  out.violation = p.violation(out.point);
  return out;
}

}  // namespace ctomo
