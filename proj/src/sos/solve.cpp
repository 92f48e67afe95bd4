#include <cmath>
#include <limits>

#include "ctomo/sos.hpp"

namespace ctomo {

std::optional<RVector> closed_form_start(SosTask task, const LinearModel& model, const SemialgebraicProgram& p) {
  EstimatorConfig cfg = EstimatorConfig::defaults_for(model.kind);
  cfg.inversion = Inversion::kMpInverse;
  try {
    BlockValues values;
    switch (task) {
      case SosTask::kQstD:
      case SosTask::kQstI:
      case SosTask::kPureState: {
        const bool identical = p.blocks.size() == 1 && model.factor_dims.size() > 1;
        const TomographyResult r = estimate_qst(model, cfg, identical ? CopyMode::kIdentical : CopyMode::kDistinct);
        for (std::size_t b = 0; b < p.blocks.size(); ++b) values.push_back({r.states[b].matrix()});
        break;
      }
      case SosTask::kQdtD:
      case SosTask::kQdtI: {
        const TomographyResult r = estimate_qdt(model, cfg, task == SosTask::kQdtI ? CopyMode::kIdentical : CopyMode::kDistinct);
        for (const auto& povm : r.povms) values.push_back(povm.elements());
        break;
      }
      case SosTask::kQptD:
      case SosTask::kQptI:
      case SosTask::kUnitary: {
        ProcessFlags flags;
        for (std::size_t b = 0; b < p.blocks.size(); ++b) {
          if (p.blocks[b].kind == VariableBlock::Kind::kProcess && !p.blocks[b].trace_preserving) {
            (b == 0 ? flags.first_tp : flags.second_tp) = false;
            if (p.blocks.size() == 1) flags.second_tp = false;
          }
        }
        const bool identical = p.blocks.size() == 1;
        const TomographyResult r = estimate_qpt(model, cfg, identical ? CopyMode::kIdentical : CopyMode::kDistinct, flags);
        for (std::size_t b = 0; b < p.blocks.size(); ++b) {
          const ProcessMatrix& x = r.processes[b];
          values.push_back({task == SosTask::kUnitary ? extract_unitary(x) : x.matrix()});
        }
        break;
      }
    }
    return encode(p, values);
  } catch (const Error&) {
    return std::nullopt;
  }
}

SosResult solve_sos(const SemialgebraicProgram& p, const SosConfig& cfg, const std::optional<RVector>& start) {
  const Relaxation rel = lasserre_relaxation(p, cfg.order, cfg.relaxation);
  const SdpSolution sol = sdp_solve(rel.sdp, cfg.sdp);

  SosResult out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.duality_gap = sol.relative_gap;
  out.order = rel.order;
  out.moments = rel.moments.size();
  if (sol.status == SdpStatus::kInfeasible) {
    // No certificate exists at this order.
    out.lower_bound = -std::numeric_limits<double>::infinity();
    out.certificate_residual = std::numeric_limits<double>::infinity();
  } else {
    out.lower_bound = relaxation_bound(rel, sol);
    out.certificate_residual = certificate_residual(rel, sol, out.lower_bound);
    const Extraction ex = extract_candidate(rel, sol, cfg.extraction_threshold);
    out.moment_ratio = ex.ratio;
    out.extracted_candidate = ex.point;
  }

  std::vector<RVector> starts;
  if (out.extracted_candidate) starts.push_back(*out.extracted_candidate);
  if (start) starts.push_back(*start);
  if (starts.empty() && !p.blocks.empty()) starts.push_back(default_point(p));
  for (const auto& s : starts) {
    try {
      const PolishResult pr = local_polish(p, s, cfg.polish);
      if (!out.candidate_cost || pr.cost < *out.candidate_cost) {
        out.candidate = pr.point;
        out.candidate_cost = pr.cost;
      }
    } catch (const InfeasibleStartError&) {
    }
  }
  if (out.candidate) {
    out.gap = *out.candidate_cost - out.lower_bound;
    if (!p.blocks.empty()) out.estimate = decode(p, *out.candidate);
  }
  return out;
}

SosResult solve_sos(SosTask task, const LinearModel& model, const SosConfig& cfg) {
  const SemialgebraicProgram p = build_sos_program(task, model, cfg.program);
  return solve_sos(p, cfg, closed_form_start(task, model, p));
}

}  // namespace ctomo
