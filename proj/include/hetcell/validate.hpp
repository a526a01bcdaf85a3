#pragma once

// Consistency checks of simulation against analytics for one configuration.
//
// All interval-based checks are built at level 1 - significance. With
// negative_control set, the area-bias, distribution and association checks
// use deliberately wrong references, so a healthy run must fail.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "hetcell/analytics.hpp"
#include "hetcell/config.hpp"
#include "hetcell/report.hpp"
#include "hetcell/stats.hpp"

namespace hetcell {

enum class CheckStatus { kPass, kFail, kSkip };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kSkip: return "skip";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kSkip;
  double observed = 0.0;
  double expected = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::kFail; });
  }
  std::size_t count(CheckStatus s) const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [s](const auto& c) { return c.status == s; }));
  }
};

inline constexpr std::size_t kEquivalenceRealizations = 5;

inline ValidationReport run_validation(const SimulationConfig& config, bool negative_control = false) {
  ValidationReport report;
  auto add = [&report](std::string name, bool ok, double observed, double expected, std::string detail) {
    report.checks.push_back({std::move(name), ok ? CheckStatus::kPass : CheckStatus::kFail, observed, expected,
                             std::move(detail)});
  };
  auto skip = [&report](std::string name, std::string why) {
    report.checks.push_back({std::move(name), CheckStatus::kSkip, 0.0, 0.0, std::move(why)});
  };
  auto tier_name = [](const char* base, std::size_t k) { return std::string(base) + "[tier " + std::to_string(k + 1) + "]"; };

  const std::vector<TierConfig> tiers = linear_tiers(config);
  const std::size_t k_count = tiers.size();
  const double alpha = config.significance;

  const std::vector<double> area = expected_mean_areas(tiers, config.strategy);
  double partition = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) partition += tiers[k].density * area[k];
  add("analytic_partition", std::fabs(partition - 1.0) < 1e-9, partition, 1.0, "sum of lambda_i * mean area_i");

  if (equal_exponents(tiers)) {
    const auto closed = mean_area_closed_form(tiers);
    double worst = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      worst = std::max(worst, std::fabs(mean_area_integral(tiers, k).value - closed[k]) / closed[k]);
    }
    add("quadrature_vs_closed_form", worst < 1e-6, worst, 1e-6, "max relative error over tiers");
  } else {
    skip("quadrature_vs_closed_form", "path-loss exponents differ; no closed form");
  }

  ExperimentSetup setup = to_setup(config);
  setup.confidence = 1.0 - alpha;
  const AreaStatistics stats = run_experiment(setup);
  report.warnings = stats.warnings;

  double worst_partition = 0.0;
  for (std::size_t r = 0; r < stats.replications; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) s += stats.tiers[k].per_replication[r].pixel_fraction;
    worst_partition = std::max(worst_partition, std::fabs(s - 1.0));
  }
  add("empirical_partition", worst_partition < 1e-4, worst_partition, 0.0, "max |sum of area fractions - 1|");

  const double lambda_total = total_density(tiers);
  for (std::size_t k = 0; k < k_count; ++k) {
    const TierStatistics& t = stats.tiers[k];
    add(tier_name("typical_mean_area", k), t.typical_mean_area.contains(area[k]), t.typical_mean_area.value,
        area[k], "CI half-width " + format_number(t.typical_mean_area.half_width));
    const double density = negative_control && k_count > 1 ? lambda_total : tiers[k].density;
    const double predicted = density * area[k];
    add(tier_name("association_identity", k), t.assoc_prob.contains(predicted), t.assoc_prob.value, predicted,
        "CI half-width " + format_number(t.assoc_prob.half_width));
  }

  bool same_maps = true;
  const std::size_t n_equiv = std::min(kEquivalenceRealizations, stats.replications);
  for (std::size_t r = 0; r < n_equiv && same_maps; ++r) {
    ExperimentSetup a = setup, b = setup;
    a.strategy = AssociationStrategy::kMaxPower;
    b.strategy = AssociationStrategy::kMaxSIR;
    same_maps = realize(a, r).map == realize(b, r).map;
  }
  add("strategy_equivalence", same_maps, same_maps ? 1.0 : 0.0, 1.0,
      "max_power and max_sir maps on " + std::to_string(n_equiv) + " realizations");

  const auto bias_ref = negative_control ? BiasReference::kUnbiased : BiasReference::kAreaBiased;
  const auto weighting = negative_control ? TypicalWeighting::kUnweighted : TypicalWeighting::kAreaWeighted;
  for (std::size_t k = 0; k < k_count; ++k) {
    try {
      const AreaBiasReport b = area_bias_check(stats, k, alpha, bias_ref);
      add(tier_name("zero_cell_area_bias", k), b.passed, b.zero_cell_mean.value, b.biased_typical_mean.value,
          "p=" + format_number(b.p_value));
    } catch (const InsufficientDataError& e) {
      skip(tier_name("zero_cell_area_bias", k), e.what());
    }
    try {
      const TierStatistics& t = stats.tiers[k];
      const DistributionBiasReport d =
          distribution_bias_check(t.zero_cell_areas, t.typical_areas, alpha, config.master_seed + k, weighting);
      add(tier_name("zero_cell_distribution", k), d.passed, d.test.statistic, 0.0, "p=" + format_number(d.test.p_value));
    } catch (const InsufficientDataError& e) {
      skip(tier_name("zero_cell_distribution", k), e.what());
    }
  }

  if (negative_control) {
    const bool corrupted_ran = std::any_of(report.checks.begin(), report.checks.end(), [k_count](const auto& c) {
      if (c.status == CheckStatus::kSkip) return false;
      return c.name.rfind("zero_cell", 0) == 0 || (k_count > 1 && c.name.rfind("association_identity", 0) == 0);
    });
    if (!corrupted_ran) add("negative_control", false, 0.0, 1.0, "no corrupted check could run on this configuration");
  }
  return report;
}

inline void write_validation_csv(std::ostream& out, const SimulationConfig& config, const ValidationReport& report) {
  out << provenance_line(config) << "\n";
  out << "check,status,observed,expected,detail\n";
  for (const CheckResult& c : report.checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    out << c.name << ',' << to_string(c.status) << ',' << format_number(c.observed) << ','
        << format_number(c.expected) << ',' << detail << "\n";
  }
}

inline void print_validation(std::ostream& out, const ValidationReport& report) {
  for (const CheckResult& c : report.checks) {
    out << (c.status == CheckStatus::kPass ? "PASS " : c.status == CheckStatus::kFail ? "FAIL " : "SKIP ") << c.name
        << "  observed=" << format_number(c.observed) << " expected=" << format_number(c.expected) << "  "
        << c.detail << "\n";
  }
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  out << report.count(CheckStatus::kPass) << " passed, " << report.count(CheckStatus::kFail) << " failed, "
      << report.count(CheckStatus::kSkip) << " skipped\n";
}

}  // namespace hetcell
