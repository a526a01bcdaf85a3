#pragma once

// CSV writers. Every file starts with a provenance comment line carrying the
// experiment id, master seed and config hash.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hetcell/analytics.hpp"
#include "hetcell/config.hpp"
#include "hetcell/stats.hpp"

namespace hetcell {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

// Tiers are written 1-based.
inline void write_summary_csv(std::ostream& out, const SimulationConfig& config, const AreaStatistics& stats) {
  const auto tiers = linear_tiers(config);
  const auto analytic_area = expected_mean_areas(tiers, config.strategy);
  out << provenance_line(config) << "\n";
  out << "experiment_id,tier,method,mean_area,ci_half_width,assoc_prob,assoc_prob_ci,zero_cell_mean,"
         "zero_cell_ci,cells,large_cell_fraction,reps,seed\n";
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    const TierStatistics& t = stats.tiers[k];
    out << config.experiment_id << ',' << k + 1 << ",montecarlo," << format_number(t.typical_mean_area.value) << ','
        << format_number(t.typical_mean_area.half_width) << ',' << format_number(t.assoc_prob.value) << ','
        << format_number(t.assoc_prob.half_width) << ',' << format_number(t.zero_cell_mean_area.value) << ','
        << format_number(t.zero_cell_mean_area.half_width) << ',' << t.cells_observed << ','
        << format_number(t.large_cell_fraction) << ',' << stats.replications << ',' << stats.master_seed << "\n";
  }
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    out << config.experiment_id << ',' << k + 1 << ",analytic," << format_number(analytic_area[k]) << ",0,"
        << format_number(tiers[k].density * analytic_area[k]) << ",0,,,,," << stats.replications << ','
        << stats.master_seed << "\n";
  }
}

inline void write_cells_csv(std::ostream& out, const SimulationConfig& config, const AreaStatistics& stats) {
  out << provenance_line(config) << "\n";
  out << "replication,ap_index,tier,area,contains_origin\n";
  for (const RawCell& r : stats.raw_cells) {
    out << r.replication << ',' << r.cell.ap_index << ',' << r.cell.tier + 1 << ',' << format_number(r.cell.area)
        << ',' << (r.cell.contains_origin ? 1 : 0) << "\n";
  }
}

inline void write_prediction_csv(std::ostream& out, const SimulationConfig& config,
                                 const AnalyticPrediction& prediction) {
  out << provenance_line(config) << "\n";
  out << "experiment_id,tier,transformed_density,mean_area,assoc_prob,mean_area_closed_form,"
         "mean_area_quadrature,quadrature_error,closed_form_rel_diff\n";
  for (std::size_t k = 0; k < prediction.per_tier_mean_area.size(); ++k) {
    const double quad = prediction.quadrature_mean_area[k].value;
    std::string closed, diff;
    if (prediction.closed_form_mean_area) {
      const double c = (*prediction.closed_form_mean_area)[k];
      closed = format_number(c);
      diff = format_number(std::fabs(quad - c) / c);
    }
    out << config.experiment_id << ',' << k + 1 << ',' << format_number(prediction.transformed_densities[k]) << ','
        << format_number(prediction.per_tier_mean_area[k]) << ',' << format_number(prediction.per_tier_assoc_prob[k])
        << ',' << closed << ',' << format_number(quad) << ','
        << format_number(prediction.quadrature_mean_area[k].error_estimate) << ',' << diff << "\n";
  }
}

}  // namespace hetcell
