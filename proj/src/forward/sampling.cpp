#include <algorithm>
#include <cmath>
#include <string>

#include "ctomo/forward.hpp"

namespace ctomo {

namespace {

std::vector<long> multinomial(const RVector& probs, long shots, Rng& rng) {
  RVector p = probs.cwiseMax(0.0);
  const double total = p.sum();
  if (!(total > 0.0)) throw InvalidObjectError("sample_counts: probabilities sum to zero");
  p /= total;
  std::vector<long> counts(static_cast<std::size_t>(p.size()), 0);
  long remaining = shots;
  double mass = 1.0;
  for (Index l = 0; l + 1 < p.size() && remaining > 0; ++l) {
    const double q = mass > 0.0 ? std::clamp(p(l) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<long> draw(remaining, q);
    const long k = draw(rng);
    counts[static_cast<std::size_t>(l)] = k;
    remaining -= k;
    mass -= p(l);
  }
  counts.back() += remaining;
  return counts;
}

// Frequencies per setting, with the shot count of each setting.
void attach_frequencies(LinearModel& model, const std::vector<RVector>& freqs,
                        const std::vector<long>& shots) {
  auto expect_settings = [&](std::size_t n, const char* what) {
    if (freqs.size() != n) {
      throw DimensionError(std::string("attach: ") + what + " expects " + std::to_string(n) +
                           " settings, got " + std::to_string(freqs.size()));
    }
  };
  auto expect_size = [&](std::size_t s, Index n) {
    if (freqs[s].size() != n) {
      throw DimensionError("attach: setting " + std::to_string(s) + " has " +
                           std::to_string(freqs[s].size()) + " outcomes, expected " + std::to_string(n));
    }
  };

  switch (model.kind) {
    case TaskKind::kQst: {
      expect_settings(model.setting_sizes.size(), "QST model");
      model.observation.resize(model.design.rows());
      model.shots_per_row.assign(static_cast<std::size_t>(model.design.rows()), 0);
      Index row = 0;
      for (std::size_t s = 0; s < freqs.size(); ++s) {
        expect_size(s, model.setting_sizes[s]);
        for (Index l = 0; l < freqs[s].size(); ++l) {
          model.observation(row) = freqs[s](l);
          model.shots_per_row[static_cast<std::size_t>(row++)] = shots[s];
        }
      }
      break;
    }
    case TaskKind::kQdt: {
      const Index m_count = model.design.rows();
      const int blocks = model.blocks();
      expect_settings(static_cast<std::size_t>(m_count), "QDT model");
      model.observation.resize(m_count * blocks);
      model.shots_per_row.assign(static_cast<std::size_t>(m_count * blocks), 0);
      for (Index m = 0; m < m_count; ++m) {
        expect_size(static_cast<std::size_t>(m), blocks);
        for (int b = 0; b < blocks; ++b) {
          model.observation(b * m_count + m) = freqs[static_cast<std::size_t>(m)](b);
          model.shots_per_row[static_cast<std::size_t>(b * m_count + m)] = shots[static_cast<std::size_t>(m)];
        }
      }
      break;
    }
    case TaskKind::kQpt: {
      const std::size_t per_probe = model.probe_setting_sizes.size();
      expect_settings(static_cast<std::size_t>(model.probes) * per_probe + (model.scale_setting ? 1 : 0),
                      "QPT model");
      const Index outcomes = model.state_design.rows();
      const int dj = static_cast<int>(model.total_dim());
      const HermitianBasis gm = gell_mann_basis(dj);
      Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(model.state_design);
      const Index dd = static_cast<Index>(dj) * dj;
      model.observation.resize(model.design.rows());
      model.shots_per_row.assign(static_cast<std::size_t>(model.design.rows()), 0);
      for (int m = 0; m < model.probes; ++m) {
        RVector f(outcomes);
        long probe_shots = 0;
        Index row = 0;
        for (std::size_t s = 0; s < per_probe; ++s) {
          const std::size_t idx = static_cast<std::size_t>(m) * per_probe + s;
          expect_size(idx, model.probe_setting_sizes[s]);
          const Index kept = model.probe_setting_sizes[s] - (model.loss_outcome ? 1 : 0);
          f.segment(row, kept) = freqs[idx].head(kept);
          row += kept;
          probe_shots += shots[idx];
        }
        if (model.qpt_data == QptData::kOutputStates) {
          const RVector coords = cod.solve(f);
          const CMatrix rho = deparameterize(ParamVector{coords}, gm);
          model.observation.segment(m * dd, dd) = vec(rho);
          for (Index r = 0; r < dd; ++r) model.shots_per_row[static_cast<std::size_t>(m * dd + r)] = probe_shots;
        } else {
          model.observation.segment(m * outcomes, outcomes) = f.cast<Complex>();
          for (Index r = 0; r < outcomes; ++r)
            model.shots_per_row[static_cast<std::size_t>(m * outcomes + r)] = probe_shots;
        }
      }
      if (model.scale_setting) {
        const RVector& cal = freqs.back();
        if (cal.size() != 2) throw DimensionError("attach: scale calibration expects two outcomes");
        model.scale_estimate = cal(0);
      }
      break;
    }
  }
  model.validate();
}

}  // namespace

std::vector<CountsRecord> sample_counts(const std::vector<RVector>& probs, long total_shots, Rng& rng,
                                        const std::vector<std::string>& ids) {
  if (probs.empty()) throw DimensionError("sample_counts: no settings");
  const long settings = static_cast<long>(probs.size());
  if (total_shots < settings) {
    throw InvalidObjectError("sample_counts: " + std::to_string(total_shots) + " shots leave some of the " +
                             std::to_string(settings) + " settings empty");
  }
  const long base = total_shots / settings;
  const long extra = total_shots % settings;
  std::vector<CountsRecord> out;
  out.reserve(probs.size());
  for (long s = 0; s < settings; ++s) {
    CountsRecord r;
    r.setting_id = static_cast<std::size_t>(s) < ids.size() ? ids[static_cast<std::size_t>(s)]
                                                            : "setting-" + std::to_string(s);
    r.shots = base + (s < extra ? 1 : 0);
    r.outcome_counts = multinomial(probs[static_cast<std::size_t>(s)], r.shots, rng);
    out.push_back(std::move(r));
  }
  return out;
}

void attach_counts(LinearModel& model, const std::vector<CountsRecord>& records) {
  std::vector<RVector> freqs;
  std::vector<long> shots;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CountsRecord& r = records[i];
    if (r.shots <= 0) throw SchemaError("record " + std::to_string(i) + " (" + r.setting_id + ") has no shots");
    RVector f(static_cast<Index>(r.outcome_counts.size()));
    for (std::size_t l = 0; l < r.outcome_counts.size(); ++l)
      f(static_cast<Index>(l)) = static_cast<double>(r.outcome_counts[l]) / static_cast<double>(r.shots);
    freqs.push_back(std::move(f));
    shots.push_back(r.shots);
  }
  attach_frequencies(model, freqs, shots);
}

void attach_probabilities(LinearModel& model, const std::vector<RVector>& probs) {
  attach_frequencies(model, probs, std::vector<long>(probs.size(), 0));
}

}  // namespace ctomo
