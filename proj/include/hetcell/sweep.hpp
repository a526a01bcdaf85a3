#pragma once

// Parameter sweeps producing long-format (one row per value, tier, method)
// series of mean cell areas.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "hetcell/analytics.hpp"
#include "hetcell/config.hpp"
#include "hetcell/report.hpp"
#include "hetcell/stats.hpp"

namespace hetcell {

struct SweepRow {
  double sweep_value = 0.0;
  std::size_t tier = 0;  // zero-based
  std::string method;    // "analytic" or "montecarlo"
  double mean_area = 0.0;
  double ci_half_width = 0.0;
  double assoc_prob = 0.0;
  std::size_t replications = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

inline SimulationConfig apply_sweep_value(SimulationConfig config, const SweepSpec& sweep, double value) {
  if (sweep.tier >= config.tiers.size()) throw InvalidArgument("sweep tier out of range");
  TierSpec& t = config.tiers[sweep.tier];
  switch (sweep.parameter) {
    case SweepParameter::kDensity:
      t.density = value;
      break;
    case SweepParameter::kSigma:
      if (t.fading.kind == FadingKind::kExponential) {
        throw InvalidArgument("a sigma sweep needs a lognormal (or deterministic) tier");
      }
      t.fading = FadingModel::lognormal(value);
      break;
    case SweepParameter::kPathLossExponent:
      t.path_loss_exponent = value;
      break;
  }
  validate(std::span<const TierConfig>(linear_tiers(config)));
  return config;
}

// Every sweep point reuses the base master seed, so neighbouring points
// share random numbers and their differences are less noisy.
inline std::vector<SweepRow> run_sweep(const SimulationConfig& base, bool monte_carlo = true) {
  if (!base.sweep) throw InvalidArgument("configuration has no sweep section");
  const SweepSpec& sweep = *base.sweep;
  std::vector<SweepRow> rows;
  for (double value : sweep.values) {
    const SimulationConfig config = apply_sweep_value(base, sweep, value);
    const auto tiers = linear_tiers(config);
    const auto area = expected_mean_areas(tiers, config.strategy);
    for (std::size_t k = 0; k < tiers.size(); ++k) {
      rows.push_back({value, k, "analytic", area[k], 0.0, tiers[k].density * area[k], 0});
    }
    if (!monte_carlo) continue;
    const AreaStatistics stats = run_experiment(config);
    for (std::size_t k = 0; k < tiers.size(); ++k) {
      const TierStatistics& t = stats.tiers[k];
      rows.push_back({value, k, "montecarlo", t.typical_mean_area.value, t.typical_mean_area.half_width,
                      t.assoc_prob.value, stats.replications});
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const SimulationConfig& config, const std::vector<SweepRow>& rows) {
  out << provenance_line(config) << "\n";
  out << "experiment_id,parameter,sweep_tier,sweep_value,tier,method,mean_area,ci_half_width,assoc_prob,reps,seed\n";
  const std::string param(config.sweep ? to_string(config.sweep->parameter) : "");
  const std::size_t sweep_tier = config.sweep ? config.sweep->tier + 1 : 0;
  for (const SweepRow& r : rows) {
    out << config.experiment_id << ',' << param << ',' << sweep_tier << ',' << format_number(r.sweep_value) << ','
        << r.tier + 1 << ',' << r.method << ',' << format_number(r.mean_area) << ','
        << format_number(r.ci_half_width) << ',' << format_number(r.assoc_prob) << ',' << r.replications << ','
        << config.master_seed << "\n";
  }
}

}  // namespace hetcell
