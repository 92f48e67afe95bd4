#include <algorithm>
#include <cmath>
#include <string>

#include "ctomo/sos.hpp"

namespace ctomo {

std::string to_string(SosTask t) {
  switch (t) {
    case SosTask::kQstD: return "qst_d";
    case SosTask::kQstI: return "qst_i";
    case SosTask::kQdtD: return "qdt_d";
    case SosTask::kQdtI: return "qdt_i";
    case SosTask::kQptD: return "qpt_d";
    case SosTask::kQptI: return "qpt_i";
    case SosTask::kPureState: return "pure_state";
    case SosTask::kUnitary: return "unitary";
  }
  return "unknown";
}

SosTask sos_task_from_string(const std::string& s) {
  for (SosTask t : {SosTask::kQstD, SosTask::kQstI, SosTask::kQdtD, SosTask::kQdtI, SosTask::kQptD, SosTask::kQptI,
                    SosTask::kPureState, SosTask::kUnitary})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown SOS task '" + s + "'");
}

void SemialgebraicProgram::validate() const {
  auto check = [&](const Polynomial& p, const std::string& what) {
    if (p.num_vars() != num_vars) {
      throw DimensionError("SemialgebraicProgram: " + what + " has " + std::to_string(p.num_vars()) +
                           " variables, expected " + std::to_string(num_vars));
    }
  };
  check(objective, "objective");
  for (std::size_t i = 0; i < equalities.size(); ++i) check(equalities[i], "equality " + std::to_string(i));
  for (std::size_t i = 0; i < inequalities.size(); ++i) check(inequalities[i], "inequality " + std::to_string(i));
  if (equality_labels.size() != equalities.size() || inequality_labels.size() != inequalities.size()) {
    throw DimensionError("SemialgebraicProgram: one label per constraint");
  }
  if (!var_names.empty() && var_names.size() != static_cast<std::size_t>(num_vars)) {
    throw DimensionError("SemialgebraicProgram: one name per variable");
  }
  for (const auto& b : blocks)
    if (b.offset < 0 || b.size < 0 || b.offset + b.size > num_vars) throw DimensionError("SemialgebraicProgram: block out of range");
}

int SemialgebraicProgram::degree() const {
  int d = objective.degree();
  for (const auto& p : equalities) d = std::max(d, p.degree());
  for (const auto& p : inequalities) d = std::max(d, p.degree());
  return d;
}

double SemialgebraicProgram::cost(const RVector& x) const { return objective.evaluate(x); }

double SemialgebraicProgram::violation(const RVector& x) const {
  double v = 0.0;
  for (const auto& h : equalities) v = std::max(v, std::abs(h.evaluate(x)));
  for (const auto& g : inequalities) v = std::max(v, -g.evaluate(x));
  return v;
}

std::size_t SemialgebraicProgram::count_inequalities(const std::string& label_prefix) const {
  return static_cast<std::size_t>(std::count_if(inequality_labels.begin(), inequality_labels.end(), [&](const std::string& l) {
    return l.rfind(label_prefix, 0) == 0;
  }));
}

ProcessFamily bit_phase_flip_family() {
  const CMatrix xi = bit_phase_flip(1.0).matrix();
  const CMatrix xy = bit_phase_flip(0.0).matrix();
  RVector lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  return {xy, {xi - xy}, lo, hi};
}

namespace {

using Kind = VariableBlock::Kind;

RVector coords_of(const CMatrix& m, const HermitianBasis& basis) { return parameterize(m, basis).values; }

CMatrix matrix_of(const RVector& coords, const HermitianBasis& basis) {
  return hermitian_part(deparameterize(ParamVector{coords}, basis));
}

// v^dagger H v with v_j = x[re + j] + i x[im + j].
Polynomial hermitian_form(const CMatrix& h, int n, int re, int im) {
  Polynomial out(n);
  const int len = static_cast<int>(h.rows());
  for (int j = 0; j < len; ++j)
    for (int k = 0; k < len; ++k) {
      const double r = h(j, k).real(), i = h(j, k).imag();
      if (r != 0.0) {
        out += r * (Polynomial::variable(n, re + j) * Polynomial::variable(n, re + k) +
                    Polynomial::variable(n, im + j) * Polynomial::variable(n, im + k));
      }
      if (i != 0.0) {
        out -= i * (Polynomial::variable(n, re + j) * Polynomial::variable(n, im + k) -
                    Polynomial::variable(n, im + j) * Polynomial::variable(n, re + k));
      }
    }
  return out.pruned(1e-14);
}

// One coordinate vector per element of the block (the POVM elements, else one).
std::vector<std::vector<Polynomial>> block_coordinates(const VariableBlock& b, int n) {
  std::vector<std::vector<Polynomial>> out;
  switch (b.kind) {
    case Kind::kState: {
      std::vector<Polynomial> c{Polynomial::constant(n, 1.0 / std::sqrt(static_cast<double>(b.dim)))};
      for (int i = 0; i < b.size; ++i) c.push_back(Polynomial::variable(n, b.offset + i));
      out.push_back(std::move(c));
      break;
    }
    case Kind::kPovm: {
      const int dd = b.dim * b.dim;
      for (int l = 0; l < b.outcomes; ++l) {
        std::vector<Polynomial> c;
        for (int i = 0; i < dd; ++i) c.push_back(Polynomial::variable(n, b.offset + l * dd + i));
        out.push_back(std::move(c));
      }
      break;
    }
    case Kind::kProcess: {
      std::vector<Polynomial> c;
      for (int i = 0; i < b.size; ++i) c.push_back(Polynomial::variable(n, b.offset + i));
      out.push_back(std::move(c));
      break;
    }
    case Kind::kFamily: {
      const HermitianBasis gm = gell_mann_basis(b.dim * b.dim);
      const RVector base = coords_of(b.base, gm);
      std::vector<Polynomial> c;
      for (Index i = 0; i < base.size(); ++i) c.push_back(Polynomial::constant(n, base(i)));
      for (std::size_t k = 0; k < b.directions.size(); ++k) {
        const RVector dir = coords_of(b.directions[k], gm);
        for (Index i = 0; i < dir.size(); ++i)
          if (std::abs(dir(i)) > 1e-15) c[static_cast<std::size_t>(i)] += dir(i) * Polynomial::variable(n, b.offset + static_cast<int>(k));
      }
      out.push_back(std::move(c));
      break;
    }
    case Kind::kPureVector: {
      const HermitianBasis gm = gell_mann_basis(b.dim);
      std::vector<Polynomial> c;
      for (const auto& e : gm.elements) c.push_back(hermitian_form(e, n, b.offset, b.offset + b.dim));
      out.push_back(std::move(c));
      break;
    }
    case Kind::kUnitary: {
      // vec(G^T) lists G row by row, matching the variable order.
      const int dd = b.dim * b.dim;
      const HermitianBasis gm = gell_mann_basis(dd);
      std::vector<Polynomial> c;
      for (const auto& e : gm.elements) c.push_back(hermitian_form(e, n, b.offset, b.offset + dd));
      out.push_back(std::move(c));
      break;
    }
  }
  return out;
}

std::vector<Polynomial> kron_coords(const std::vector<Polynomial>& a, const std::vector<Polynomial>& b) {
  std::vector<Polynomial> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

// sum_b ||y_b - A t_b||^2 for real coordinate tensors t_b.
Polynomial least_squares_objective(const CMatrix& a, const std::vector<CVector>& ys,
                                   const std::vector<std::vector<Polynomial>>& ts, int n) {
  const RMatrix q = (a.adjoint() * a).real();
  Eigen::SelfAdjointEigenSolver<RMatrix> es((q + q.transpose()) / 2.0);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::vector<RVector> rows;
  for (Index r = 0; r < es.eigenvalues().size(); ++r)
    if (es.eigenvalues()(r) > 1e-13 * top) rows.push_back(std::sqrt(es.eigenvalues()(r)) * es.eigenvectors().col(r));

  Polynomial f(n);
  for (std::size_t b = 0; b < ys.size(); ++b) {
    const auto& t = ts[b];
    if (static_cast<Index>(t.size()) != a.cols()) throw DimensionError("least_squares_objective: tensor length mismatch");
    const RVector c = (a.adjoint() * ys[b]).real();
    f += Polynomial::constant(n, ys[b].squaredNorm());
    for (std::size_t i = 0; i < t.size(); ++i)
      if (c(static_cast<Index>(i)) != 0.0) f -= (2.0 * c(static_cast<Index>(i))) * t[i];
    for (const auto& g : rows) {
      const double gmax = g.cwiseAbs().maxCoeff();
      Polynomial w(n);
      for (std::size_t i = 0; i < t.size(); ++i)
        if (std::abs(g(static_cast<Index>(i))) > 1e-15 * gmax) w += g(static_cast<Index>(i)) * t[i];
      f += w * w;
    }
  }
  return f.pruned(1e-14);
}

class ProgramBuilder {
 public:
  SemialgebraicProgram prog;

  int add_block(VariableBlock b, const std::string& name) {
    b.offset = static_cast<int>(prog.var_names.size());
    for (int i = 0; i < b.size; ++i) prog.var_names.push_back(var_name(b, name, i));
    prog.blocks.push_back(std::move(b));
    names_.push_back(name);
    return static_cast<int>(prog.blocks.size()) - 1;
  }

  // Call once all blocks exist.
  void finish_layout() {
    prog.num_vars = static_cast<int>(prog.var_names.size());
    prog.objective = Polynomial(prog.num_vars);
    for (const auto& b : prog.blocks) coords_.push_back(block_coordinates(b, prog.num_vars));
  }

  const std::vector<std::vector<Polynomial>>& coords(int block) const { return coords_[static_cast<std::size_t>(block)]; }
  int n() const { return prog.num_vars; }

  void equality(Polynomial p, const std::string& label) {
    prog.equalities.push_back(std::move(p));
    prog.equality_labels.push_back(label);
  }
  void inequality(Polynomial p, const std::string& label) {
    prog.inequalities.push_back(std::move(p));
    prog.inequality_labels.push_back(label);
  }

  void constrain(int block, const ProgramOptions& opts) {
    const VariableBlock& b = prog.blocks[static_cast<std::size_t>(block)];
    const std::string& name = names_[static_cast<std::size_t>(block)];
    const int n = prog.num_vars;
    switch (b.kind) {
      case Kind::kState: {
        const auto& theta = coords(block).front();
        if (b.dim == 2) {
          Polynomial g = Polynomial::constant(n, 0.5);
          for (std::size_t i = 1; i < theta.size(); ++i) g -= theta[i] * theta[i];
          inequality(g, "ball:" + name);
        } else {
          const auto k = kimura_constraints(theta, gell_mann_basis(b.dim));
          for (std::size_t p = 0; p < k.size(); ++p) inequality(k[p], "kimura:" + name + ":" + std::to_string(p + 2));
        }
        break;
      }
      case Kind::kPovm: {
        const HermitianBasis gm = gell_mann_basis(b.dim);
        const auto& elems = coords(block);
        for (std::size_t i = 0; i < gm.elements.size(); ++i) {
          Polynomial h = Polynomial::constant(n, i == 0 ? -std::sqrt(static_cast<double>(b.dim)) : 0.0);
          for (const auto& phi : elems) h += phi[i];
          equality(h, "completeness:" + name + ":" + std::to_string(i));
        }
        if (b.dim > 4) throw DimensionError("build_sos_program: POVM dimension above 4 is not supported");
        for (std::size_t l = 0; l < elems.size(); ++l) {
          const std::string tag = name + ":" + std::to_string(l);
          inequality(elems[l][0], "trace:" + tag);
          // e_p(P) = (sqrt(d) phi^1)^p k_p(P / Tr P), so the normalized-element
          // condition stays polynomial.
          const auto e = elementary_symmetric(PolyMatrix::from_coordinates(elems[l], gm.elements));
          for (std::size_t p = 1; p < e.size(); ++p) inequality(e[p], "kimura:" + tag + ":" + std::to_string(p + 1));
          if (b.dim == 2 && opts.ball_constraints) {
            Polynomial g = Polynomial::constant(n, 1.0);
            for (const auto& c : elems[l]) g -= c * c;
            inequality(g, "ball:" + tag);
          }
        }
        break;
      }
      case Kind::kProcess: {
        const int d = b.dim;
        if (d > 2) throw DimensionError("build_sos_program: process constraints need d <= 2 (d^2 <= 4)");
        const HermitianBasis gm2 = gell_mann_basis(d * d);
        const HermitianBasis gm = gell_mann_basis(d);
        const auto& x = coords(block).front();
        const PolyMatrix xm = PolyMatrix::from_coordinates(x, gm2.elements);
        const auto ex = elementary_symmetric(xm);
        for (std::size_t p = b.trace_preserving ? 1 : 0; p < ex.size(); ++p)
          inequality(ex[p], "psd:" + name + ":" + std::to_string(p + 1));
        if (b.trace_preserving) {
          for (std::size_t j = 0; j < gm.elements.size(); ++j) {
            const CMatrix lifted = kron(CMatrix::Identity(d, d), gm.elements[j]);
            Polynomial h = Polynomial::constant(n, -gm.elements[j].trace().real());
            for (std::size_t i = 0; i < gm2.elements.size(); ++i) {
              const double c = (lifted * gm2.elements[i]).trace().real();
              if (std::abs(c) > 1e-14) h += c * x[i];
            }
            equality(h, "tp:" + name + ":" + std::to_string(j));
          }
        } else {
          // I - Tr_1 X >= 0.
          PolyMatrix rest = PolyMatrix::identity(d, n);
          for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c)
              for (int k = 0; k < d; ++k) rest(a, c) -= xm(k * d + a, k * d + c);
          const auto er = elementary_symmetric(rest);
          for (std::size_t p = 0; p < er.size(); ++p) inequality(er[p], "subunital:" + name + ":" + std::to_string(p + 1));
        }
        break;
      }
      case Kind::kFamily:
        for (int k = 0; k < b.size; ++k) {
          const Polynomial p = Polynomial::variable(n, b.offset + k);
          inequality(p - Polynomial::constant(n, b.lower(k)), "lower:" + name + ":" + std::to_string(k));
          inequality(Polynomial::constant(n, b.upper(k)) - p, "upper:" + name + ":" + std::to_string(k));
        }
        break;
      case Kind::kPureVector: {
        Polynomial h = Polynomial::constant(n, -1.0);
        for (int i = 0; i < 2 * b.dim; ++i) h += Polynomial::variable(n, b.offset + i).pow(2);
        equality(h, "norm:" + name);
        break;
      }
      case Kind::kUnitary: {
        const int d = b.dim, dd = d * d;
        auto re = [&](int r, int c) { return Polynomial::variable(n, b.offset + r * d + c); };
        auto im = [&](int r, int c) { return Polynomial::variable(n, b.offset + dd + r * d + c); };
        for (int r = 0; r < d; ++r)
          for (int c = r; c < d; ++c) {
            Polynomial real_part = Polynomial::constant(n, r == c ? -1.0 : 0.0);
            Polynomial imag_part(n);
            for (int k = 0; k < d; ++k) {
              real_part += re(r, k) * re(c, k) + im(r, k) * im(c, k);
              imag_part += im(r, k) * re(c, k) - re(r, k) * im(c, k);
            }
            const std::string tag = name + ":" + std::to_string(r) + std::to_string(c);
            equality(real_part, "unitarity_re:" + tag);
            if (r != c) equality(imag_part, "unitarity_im:" + tag);
          }
        break;
      }
    }
  }

 private:
  static std::string var_name(const VariableBlock& b, const std::string& name, int i) {
    switch (b.kind) {
      case Kind::kState: return name + ".theta" + std::to_string(i + 2);
      case Kind::kPovm: {
        const int dd = b.dim * b.dim;
        return name + "." + std::to_string(i / dd + 1) + ".phi" + std::to_string(i % dd + 1);
      }
      case Kind::kProcess: return name + ".x" + std::to_string(i + 1);
      case Kind::kFamily: return name + ".p" + std::to_string(i + 1);
      case Kind::kPureVector:
        return name + (i < b.dim ? ".re" : ".im") + std::to_string(i % b.dim + 1);
      case Kind::kUnitary: {
        const int dd = b.dim * b.dim, k = i % dd;
        return name + (i < dd ? ".re" : ".im") + std::to_string(k / b.dim + 1) + std::to_string(k % b.dim + 1);
      }
    }
    return name;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<std::vector<Polynomial>>> coords_;
};

VariableBlock state_block(int d) {
  VariableBlock b;
  b.kind = Kind::kState;
  b.dim = d;
  b.size = d * d - 1;
  return b;
}

VariableBlock povm_block(int d, int outcomes) {
  VariableBlock b;
  b.kind = Kind::kPovm;
  b.dim = d;
  b.outcomes = outcomes;
  b.size = outcomes * d * d;
  return b;
}

VariableBlock process_block(int d, bool tp, const ProcessFamily* family) {
  VariableBlock b;
  b.dim = d;
  b.trace_preserving = tp;
  if (family) {
    const Index side = static_cast<Index>(d) * d;
    if (family->base.rows() != side || family->base.cols() != side) throw DimensionError("ProcessFamily: base has the wrong size");
    const Index k = static_cast<Index>(family->directions.size());
    if (k == 0 || family->lower.size() != k || family->upper.size() != k) {
      throw DimensionError("ProcessFamily: need matching directions and bounds");
    }
    for (const auto& dir : family->directions)
      if (dir.rows() != side || dir.cols() != side) throw DimensionError("ProcessFamily: direction has the wrong size");
    b.kind = Kind::kFamily;
    b.size = static_cast<int>(k);
    b.base = family->base;
    b.directions = family->directions;
    b.lower = family->lower;
    b.upper = family->upper;
  } else {
    b.kind = Kind::kProcess;
    b.size = d * d * d * d;
  }
  return b;
}

CMatrix natural_to_gell_mann(int d) {
  const HermitianBasis gm = gell_mann_basis(d * d);
  CMatrix out(static_cast<Index>(d) * d * d * d, static_cast<Index>(gm.elements.size()));
  for (std::size_t i = 0; i < gm.elements.size(); ++i) out.col(static_cast<Index>(i)) = vec(gm.elements[i]);
  return out;
}

void require_model(const LinearModel& model, TaskKind kind, const char* task) {
  if (model.kind != kind) throw ConfigError(std::string("build_sos_program: ") + task + " needs a matching model kind");
  if (model.observation.size() == 0) throw ConfigError(std::string("build_sos_program: ") + task + " model has no data");
  model.validate();
}

void require_equal_dims(const std::vector<int>& dims, const char* what) {
  for (int d : dims)
    if (d != dims.front()) throw ConfigError(std::string(what) + ": identical copies need equal dimensions");
}

std::vector<Polynomial> tensor_of(const std::vector<const std::vector<Polynomial>*>& factors) {
  std::vector<Polynomial> t = *factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) t = kron_coords(t, *factors[k]);
  return t;
}

}  // namespace

SemialgebraicProgram build_sos_program(SosTask task, const LinearModel& model, const ProgramOptions& opts) {
  ProgramBuilder pb;
  switch (task) {
    case SosTask::kQstD:
    case SosTask::kQstI:
    case SosTask::kPureState: {
      require_model(model, TaskKind::kQst, to_string(task).c_str());
      const auto& dims = model.factor_dims;
      const bool pure = task == SosTask::kPureState;
      const bool identical = task == SosTask::kQstI || (pure && opts.pure_mode == CopyMode::kIdentical);
      if (identical) require_equal_dims(dims, "build_sos_program");
      std::vector<int> owner;
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (identical && f > 0) {
          owner.push_back(0);
          continue;
        }
        VariableBlock b = state_block(dims[f]);
        if (pure) {
          b.kind = Kind::kPureVector;
          b.size = 2 * dims[f];
        }
        const std::string name = (pure ? "psi" : "rho") + (identical ? std::string() : std::to_string(f + 1));
        owner.push_back(pb.add_block(b, name));
      }
      pb.finish_layout();
      std::vector<const std::vector<Polynomial>*> factors;
      for (int o : owner) factors.push_back(&pb.coords(o).front());
      pb.prog.objective = least_squares_objective(model.design, {model.observation}, {tensor_of(factors)}, pb.n());
      for (std::size_t b = 0; b < pb.prog.blocks.size(); ++b) pb.constrain(static_cast<int>(b), opts);
      break;
    }
    case SosTask::kQdtD:
    case SosTask::kQdtI: {
      require_model(model, TaskKind::kQdt, to_string(task).c_str());
      const int d1 = model.factor_dims[0], d2 = model.factor_dims[1];
      const int nl = model.outcomes_left, nk = model.outcomes_right;
      const bool identical = task == SosTask::kQdtI;
      if (identical && (d1 != d2 || nl != nk)) throw ConfigError("build_sos_program: qdt_i needs matching detectors");
      const int left = pb.add_block(povm_block(d1, nl), identical ? "P" : "P1");
      const int right = identical ? left : pb.add_block(povm_block(d2, nk), "P2");
      pb.finish_layout();
      const Index m = model.design.rows();
      std::vector<CVector> ys;
      std::vector<std::vector<Polynomial>> ts;
      for (int l = 0; l < nl; ++l)
        for (int k = 0; k < nk; ++k) {
          ys.push_back(model.observation.segment((l * nk + k) * m, m));
          ts.push_back(kron_coords(pb.coords(left)[static_cast<std::size_t>(l)], pb.coords(right)[static_cast<std::size_t>(k)]));
        }
      pb.prog.objective = least_squares_objective(model.design, ys, ts, pb.n());
      for (std::size_t b = 0; b < pb.prog.blocks.size(); ++b) pb.constrain(static_cast<int>(b), opts);
      break;
    }
    case SosTask::kQptD:
    case SosTask::kQptI:
    case SosTask::kUnitary: {
      require_model(model, TaskKind::kQpt, to_string(task).c_str());
      const int d1 = model.factor_dims[0], d2 = model.factor_dims[1];
      const bool unitary = task == SosTask::kUnitary;
      const bool identical = task == SosTask::kQptI || (unitary && opts.unitary_mode == CopyMode::kIdentical);
      if (identical && d1 != d2) throw ConfigError("build_sos_program: identical processes need equal dimensions");
      const std::size_t unknowns = identical ? 1 : 2;
      if (!unitary && !opts.families.empty() && opts.families.size() != unknowns) {
        throw ConfigError("build_sos_program: expected " + std::to_string(unknowns) + " process families");
      }
      const int dims[2] = {d1, d2};
      const bool tp[2] = {opts.first_tp && (!identical || opts.second_tp), opts.second_tp};
      std::vector<int> owner;
      for (std::size_t u = 0; u < unknowns; ++u) {
        VariableBlock b;
        if (unitary) {
          b.kind = Kind::kUnitary;
          b.dim = dims[u];
          b.size = 2 * dims[u] * dims[u];
        } else {
          b = process_block(dims[u], tp[u], opts.families.empty() ? nullptr : &opts.families[u]);
        }
        const std::string stem = unitary ? "G" : (b.kind == Kind::kFamily ? "family" : "X");
        owner.push_back(pb.add_block(b, identical ? stem : stem + std::to_string(u + 1)));
      }
      if (identical) owner.push_back(owner.front());
      pb.finish_layout();
      const CMatrix design = model.design * kron(natural_to_gell_mann(d1), natural_to_gell_mann(d2));
      pb.prog.objective = least_squares_objective(
          design, {model.observation}, {kron_coords(pb.coords(owner[0]).front(), pb.coords(owner[1]).front())}, pb.n());
      for (std::size_t b = 0; b < pb.prog.blocks.size(); ++b) pb.constrain(static_cast<int>(b), opts);
      break;
    }
  }
  pb.prog.validate();
  return pb.prog;
}

BlockValues decode(const SemialgebraicProgram& p, const RVector& x) {
  if (x.size() != p.num_vars) throw DimensionError("decode: point has the wrong length");
  BlockValues out;
  for (const auto& b : p.blocks) {
    const RVector v = x.segment(b.offset, b.size);
    switch (b.kind) {
      case Kind::kState: {
        RVector theta(b.size + 1);
        theta << 1.0 / std::sqrt(static_cast<double>(b.dim)), v;
        out.push_back({matrix_of(theta, gell_mann_basis(b.dim))});
        break;
      }
      case Kind::kPovm: {
        const HermitianBasis gm = gell_mann_basis(b.dim);
        const int dd = b.dim * b.dim;
        std::vector<CMatrix> elems;
        for (int l = 0; l < b.outcomes; ++l) elems.push_back(matrix_of(v.segment(l * dd, dd), gm));
        out.push_back(std::move(elems));
        break;
      }
      case Kind::kProcess: out.push_back({matrix_of(v, gell_mann_basis(b.dim * b.dim))}); break;
      case Kind::kFamily: {
        CMatrix m = b.base;
        for (int k = 0; k < b.size; ++k) m += v(k) * b.directions[static_cast<std::size_t>(k)];
        out.push_back({hermitian_part(m)});
        break;
      }
      case Kind::kPureVector: {
        const CVector psi = v.head(b.dim).cast<Complex>() + Complex(0.0, 1.0) * v.tail(b.dim).cast<Complex>();
        out.push_back({CMatrix(psi * psi.adjoint()), CMatrix(psi)});
        break;
      }
      case Kind::kUnitary: {
        const int dd = b.dim * b.dim;
        CMatrix g(b.dim, b.dim);
        for (int i = 0; i < dd; ++i) g(i / b.dim, i % b.dim) = Complex(v(i), v(dd + i));
        out.push_back({g});
        break;
      }
    }
  }
  return out;
}

RVector encode(const SemialgebraicProgram& p, const BlockValues& values) {
  if (values.size() != p.blocks.size()) throw DimensionError("encode: one value set per block");
  RVector x = RVector::Zero(p.num_vars);
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const VariableBlock& b = p.blocks[i];
    const auto& val = values[i];
    if (val.empty()) throw DimensionError("encode: empty value set");
    switch (b.kind) {
      case Kind::kState:
        x.segment(b.offset, b.size) = coords_of(val.front(), gell_mann_basis(b.dim)).tail(b.size);
        break;
      case Kind::kPovm: {
        if (static_cast<int>(val.size()) != b.outcomes) throw DimensionError("encode: POVM outcome count");
        const HermitianBasis gm = gell_mann_basis(b.dim);
        const int dd = b.dim * b.dim;
        for (int l = 0; l < b.outcomes; ++l) x.segment(b.offset + l * dd, dd) = coords_of(val[static_cast<std::size_t>(l)], gm);
        break;
      }
      case Kind::kProcess: x.segment(b.offset, b.size) = coords_of(val.front(), gell_mann_basis(b.dim * b.dim)); break;
      case Kind::kFamily: {
        const HermitianBasis gm = gell_mann_basis(b.dim * b.dim);
        RMatrix dirs(static_cast<Index>(gm.elements.size()), b.size);
        for (int k = 0; k < b.size; ++k) dirs.col(k) = coords_of(b.directions[static_cast<std::size_t>(k)], gm);
        const RVector target = coords_of(val.front(), gm) - coords_of(b.base, gm);
        const RVector pk = dirs.colPivHouseholderQr().solve(target);
        x.segment(b.offset, b.size) = pk.cwiseMax(b.lower).cwiseMin(b.upper);
        break;
      }
      case Kind::kPureVector: {
        CVector psi;
        if (val.size() > 1) {
          psi = val[1].col(0);
        } else {
          psi = hermitian_eig(val.front()).vectors.col(0);
        }
        x.segment(b.offset, b.dim) = psi.real();
        x.segment(b.offset + b.dim, b.dim) = psi.imag();
        break;
      }
      case Kind::kUnitary: {
        const int dd = b.dim * b.dim;
        for (int k = 0; k < dd; ++k) {
          x(b.offset + k) = val.front()(k / b.dim, k % b.dim).real();
          x(b.offset + dd + k) = val.front()(k / b.dim, k % b.dim).imag();
        }
        break;
      }
    }
  }
  return x;
}

RVector default_point(const SemialgebraicProgram& p) {
  BlockValues values;
  for (const auto& b : p.blocks) {
    const CMatrix id = CMatrix::Identity(b.dim, b.dim);
    switch (b.kind) {
      case Kind::kState: values.push_back({id / static_cast<double>(b.dim)}); break;
      case Kind::kPovm: values.push_back(std::vector<CMatrix>(static_cast<std::size_t>(b.outcomes), id / static_cast<double>(b.outcomes))); break;
      case Kind::kProcess:
        values.push_back({CMatrix(CMatrix::Identity(b.dim * b.dim, b.dim * b.dim) / static_cast<double>(b.dim))});
        break;
      case Kind::kFamily: {
        CMatrix m = b.base;
        for (int k = 0; k < b.size; ++k) m += 0.5 * (b.lower(k) + b.upper(k)) * b.directions[static_cast<std::size_t>(k)];
        values.push_back({m});
        break;
      }
      case Kind::kPureVector: {
        CVector e = CVector::Zero(b.dim);
        e(0) = 1.0;
        values.push_back({CMatrix(e * e.adjoint()), CMatrix(e)});
        break;
      }
      case Kind::kUnitary: values.push_back({id}); break;
    }
  }
  RVector x = encode(p, values);
  return x;
}

}  // namespace ctomo
