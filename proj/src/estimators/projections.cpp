#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "ctomo/estimators.hpp"

namespace ctomo {

namespace {

struct Spectrum {
  RVector values;
  CMatrix vectors;
};

Spectrum spectrum_of(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix clip_psd(const CMatrix& h) {
  const Spectrum s = spectrum_of(hermitian_part(h));
  const RVector clipped = s.values.cwiseMax(0.0);
  return hermitian_part(s.vectors * clipped.cast<Complex>().asDiagonal() * s.vectors.adjoint());
}

double psd_violation(const std::vector<CMatrix>& xs) {
  double v = 0.0;
  for (const auto& x : xs) v = std::max(v, -min_eigenvalue(x));
  return v;
}

CMatrix identity_lift(const CMatrix& delta, int d) {
  return kron(CMatrix::Identity(d, d), delta) / static_cast<double>(d);
}

// Dykstra's alternating projections between the PSD set (elementwise) and a
// second convex set; returns the final iterate, which lies in the second set.
std::vector<CMatrix> dykstra(std::vector<CMatrix> x,
                             const std::function<std::vector<CMatrix>(const std::vector<CMatrix>&)>& onto_second,
                             const ProjectionOptions& opts, int& iterations, double& violation,
                             const char* what) {
  const std::size_t n = x.size();
  std::vector<CMatrix> p(n), q(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = CMatrix::Zero(x[i].rows(), x[i].cols());
    q[i] = p[i];
  }
  for (iterations = 1; iterations <= opts.max_iterations; ++iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = clip_psd(x[i] + p[i]);
      p[i] = x[i] + p[i] - y[i];
      w[i] = y[i] + q[i];
    }
    x = onto_second(w);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] - x[i];
    violation = psd_violation(x);
    if (violation < opts.tolerance) return x;
  }
  iterations = opts.max_iterations;
  throw ProjectionFailure(std::string(what) + ": Dykstra iteration did not converge (PSD violation " +
                              std::to_string(violation) + ")",
                          x, violation);
}

}  // namespace

RVector project_simplex(const RVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, shift = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) shift = t;
  }
  return (v.array() - shift).cwiseMax(0.0);
}

QuantumState project_state(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionError("project_state: non-square input");
  require_finite(m, "project_state");
  const CMatrix h = hermitian_part(m);
  const Spectrum s = spectrum_of(h);
  if (s.values.minCoeff() >= 0.0 && std::abs(s.values.sum() - 1.0) <= 1e-14) return QuantumState(h);
  const RVector lambda = project_simplex(s.values);
  return QuantumState(hermitian_part(s.vectors * lambda.cast<Complex>().asDiagonal() * s.vectors.adjoint()));
}

PovmProjection project_povm(const std::vector<CMatrix>& elements, const ProjectionOptions& opts) {
  if (elements.empty()) throw DimensionError("project_povm: no elements");
  const Index d = elements.front().rows();
  std::vector<CMatrix> x;
  for (const auto& e : elements) {
    if (e.rows() != d || e.cols() != d) throw DimensionError("project_povm: element dimensions differ");
    require_finite(e, "project_povm");
    x.push_back(hermitian_part(e));
  }
  const double count = static_cast<double>(x.size());
  const CMatrix id = CMatrix::Identity(d, d);
  auto completeness_gap = [&](const std::vector<CMatrix>& xs) {
    CMatrix sum = -id;
    for (const auto& e : xs) sum += e;
    return sum;
  };

  PovmProjection out{Povm({id}), 0, 0.0};
  const bool hermitian = std::all_of(elements.begin(), elements.end(),
                                     [&](const CMatrix& e) { return is_hermitian(e, opts.fixed_point_tolerance); });
  if (hermitian && psd_violation(x) <= opts.fixed_point_tolerance &&
      completeness_gap(x).cwiseAbs().maxCoeff() <= opts.fixed_point_tolerance) {
    out.povm = Povm(x);
    return out;
  }

  auto onto_complete = [&](const std::vector<CMatrix>& xs) {
    const CMatrix shift = -completeness_gap(xs) / count;
    std::vector<CMatrix> r = xs;
    for (auto& e : r) e += shift;
    return r;
  };
  x = dykstra(onto_complete(x), onto_complete, opts, out.iterations, out.violation, "project_povm");
  if (out.violation > 0.0) {
    // Mixing towards I/L removes the residual negativity and keeps the sum at I.
    const double eps = out.violation / (out.violation + 1.0 / count);
    for (auto& e : x) e = (1.0 - eps) * e + (eps / count) * id;
  }
  out.povm = Povm(std::move(x));
  return out;
}

ProcessProjection project_process(const CMatrix& m, bool trace_preserving, const ProjectionOptions& opts) {
  if (m.rows() != m.cols()) throw DimensionError("project_process: non-square input");
  require_finite(m, "project_process");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
  if (static_cast<Index>(d) * d != m.rows()) throw DimensionError("project_process: side is not d^2");
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix h = hermitian_part(m);

  auto excess = [&](const CMatrix& x) -> CMatrix { return partial_trace(x, d, d, Subsystem::kFirst) - id; };
  auto second_set_gap = [&](const CMatrix& x) {
    const CMatrix e = hermitian_part(excess(x));
    return trace_preserving ? e.cwiseAbs().maxCoeff() : std::max(0.0, -min_eigenvalue(-e));
  };

  ProcessProjection out{identity_process(d), 0, 0.0};
  if (is_hermitian(m, opts.fixed_point_tolerance) && psd_violation({h}) <= opts.fixed_point_tolerance &&
      second_set_gap(h) <= opts.fixed_point_tolerance) {
    out.process = ProcessMatrix(h, trace_preserving);
    return out;
  }

  auto onto_second = [&](const std::vector<CMatrix>& xs) {
    const CMatrix& x = xs.front();
    const CMatrix e = hermitian_part(excess(x));
    if (trace_preserving) return std::vector<CMatrix>{hermitian_part(x - identity_lift(e, d))};
    const CMatrix positive = clip_psd(e);
    return std::vector<CMatrix>{hermitian_part(x - identity_lift(positive, d))};
  };
  std::vector<CMatrix> x = dykstra(onto_second({h}), onto_second, opts, out.iterations, out.violation,
                                   "project_process");
  CMatrix result = x.front();
  if (out.violation > 0.0) {
    const double eps = out.violation / (out.violation + 1.0 / d);
    result = (1.0 - eps) * result + (eps / d) * CMatrix::Identity(d * d, d * d);
  }
  out.process = ProcessMatrix(hermitian_part(result), trace_preserving);
  return out;
}

}  // namespace ctomo
