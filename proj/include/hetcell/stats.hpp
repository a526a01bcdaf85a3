#pragma once

// Monte Carlo estimation of typical-cell and zero-cell statistics.
//
// Every replication is an independent torus realization. Typical-cell
// quantities are ratio estimators over all APs of all replications
// (sum of cell areas / number of cells); their confidence intervals come from
// replication-level totals via the delta method, never from cells within one
// replication, which are dependent.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hetcell/analytics.hpp"
#include "hetcell/association.hpp"
#include "hetcell/error.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/pointprocess.hpp"
#include "hetcell/random.hpp"
#include "hetcell/tessellation.hpp"
#include "hetcell/tier.hpp"

namespace hetcell {

// Point estimate with a symmetric confidence half-width.
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;

  double lower() const noexcept { return value - half_width; }
  double upper() const noexcept { return value + half_width; }
  bool contains(double x) const noexcept { return x >= lower() && x <= upper(); }
  double standard_error(double z) const noexcept { return z > 0.0 ? half_width / z : 0.0; }

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

inline bool overlaps(const Estimate& a, const Estimate& b) noexcept {
  return a.lower() <= b.upper() && b.lower() <= a.upper();
}

inline double student_t_quantile(double confidence, std::size_t n) {
  if (n < 2) return std::numeric_limits<double>::infinity();
  boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(dist, 0.5 + 0.5 * confidence);
}

inline double normal_two_sided_p(double z) {
  boost::math::normal dist;
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z)));
}

// Sample mean with a t-based confidence interval.
inline Estimate mean_estimate(std::span<const double> x, double confidence = 0.95) {
  const std::size_t n = x.size();
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return {mean, student_t_quantile(confidence, n) * se};
}

// sum(num) / sum(den) with a delta-method interval over replications.
inline Estimate ratio_estimate(std::span<const double> num, std::span<const double> den, double confidence = 0.95) {
  const std::size_t n = num.size();
  double sn = 0.0, sd = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sn += num[r];
    sd += den[r];
  }
  if (!(sd > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
  const double ratio = sn / sd;
  if (n < 2) return {ratio, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double e = num[r] - ratio * den[r];
    ss += e * e;
  }
  const double mean_den = sd / static_cast<double>(n);
  const double se = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1))) / mean_den;
  return {ratio, student_t_quantile(confidence, n) * se};
}

struct ExperimentSetup {
  Window window{30.0, 1500};
  std::vector<TierConfig> tiers;
  AssociationStrategy strategy = AssociationStrategy::kMaxPower;
  GainFieldMode gain_mode = GainFieldMode::kPerAP;
  std::size_t replications = 20;
  Seed master_seed = 1;
  double significance = 0.01;
  double confidence = 0.95;
  bool keep_raw_cells = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Per-tier totals of one replication.
struct TierTotals {
  double cells = 0.0;
  double area = 0.0;
  double area_squared = 0.0;
  double pixel_fraction = 0.0;
  double large_cells = 0.0;  // cells larger than 1% of the window

  friend bool operator==(const TierTotals&, const TierTotals&) = default;
};

struct RawCell {
  std::size_t replication = 0;
  CellRecord cell;
};

struct ReplicationResult {
  std::vector<TierTotals> tiers;
  std::vector<std::vector<double>> cell_areas;  // per tier
  CellRecord zero_cell;
  std::vector<CellRecord> cells;  // only when raw cells are kept
};

struct TierStatistics {
  Estimate typical_mean_area;
  Estimate typical_second_moment;
  Estimate zero_cell_mean_area;
  Estimate assoc_prob;
  std::size_t cells_observed = 0;
  std::size_t zero_cell_count = 0;
  double large_cell_fraction = 0.0;
  std::vector<double> typical_areas;
  std::vector<double> zero_cell_areas;
  std::vector<TierTotals> per_replication;

  friend bool operator==(const TierStatistics&, const TierStatistics&) = default;
};

struct AreaStatistics {
  std::vector<TierStatistics> tiers;
  std::size_t replications = 0;
  Seed master_seed = 0;
  double confidence = 0.95;
  std::vector<RawCell> raw_cells;
  std::vector<std::string> warnings;

  friend bool operator==(const AreaStatistics& a, const AreaStatistics& b) {
    return a.tiers == b.tiers && a.replications == b.replications && a.master_seed == b.master_seed;
  }
};

// Analytic mean cell areas for the strategy: Voronoi (1/lambda) for Nearest,
// the max-power formulas otherwise.
inline std::vector<double> expected_mean_areas(std::span<const TierConfig> tiers, AssociationStrategy strategy) {
  if (strategy == AssociationStrategy::kNearest) return std::vector<double>(tiers.size(), 1.0 / total_density(tiers));
  return mean_areas(tiers);
}

struct Realization {
  PointPattern pattern;
  AssociationMap map;
};

inline Realization realize(const ExperimentSetup& setup, std::size_t replication) {
  const std::span<const TierConfig> tiers = setup.tiers;
  PointPattern pattern = sample_marked_pattern(tiers, setup.window, setup.master_seed, replication);
  const GainField gains(pattern, tiers, setup.gain_mode,
                        derive_stream(setup.master_seed, replication, StreamPurpose::kGains));
  AssociationMap map = compute_association_map(pattern, tiers, setup.strategy, gains, setup.window);
  return {std::move(pattern), std::move(map)};
}

// One realization: sample, tessellate, summarize.
inline ReplicationResult simulate_replication(const ExperimentSetup& setup, std::size_t replication) {
  const std::span<const TierConfig> tiers = setup.tiers;
  const auto [pattern, map] = realize(setup, replication);
  std::vector<CellRecord> cells = cell_areas(map, pattern);

  ReplicationResult out;
  out.tiers.assign(tiers.size(), {});
  out.cell_areas.assign(tiers.size(), {});
  const double window_area = setup.window.area();
  for (const CellRecord& c : cells) {
    TierTotals& t = out.tiers[c.tier];
    t.cells += 1.0;
    t.area += c.area;
    t.area_squared += c.area * c.area;
    t.pixel_fraction += static_cast<double>(map.cell_pixel_counts[c.ap_index]);
    if (c.area > 0.01 * window_area) t.large_cells += 1.0;
    out.cell_areas[c.tier].push_back(c.area);
    if (c.contains_origin) out.zero_cell = c;
  }
  for (auto& t : out.tiers) t.pixel_fraction /= static_cast<double>(setup.window.pixel_count());
  if (setup.keep_raw_cells) out.cells = std::move(cells);
  return out;
}

// Runs every replication (concurrently when threads allow) and reduces in
// replication order, so the result does not depend on scheduling.
inline AreaStatistics run_experiment(const ExperimentSetup& setup) {
  validate(std::span<const TierConfig>(setup.tiers));
  if (setup.replications < 2) throw InvalidArgument("an experiment needs at least 2 replications");
  if (!(setup.confidence > 0.0 && setup.confidence < 1.0)) throw InvalidArgument("confidence must lie in (0, 1)");

  AreaStatistics stats;
  stats.replications = setup.replications;
  stats.master_seed = setup.master_seed;
  stats.confidence = setup.confidence;

  const std::vector<double> expected = expected_mean_areas(setup.tiers, setup.strategy);
  const double largest = *std::max_element(expected.begin(), expected.end());
  if (setup.window.area() < 100.0 * largest) {
    stats.warnings.push_back("window area " + std::to_string(setup.window.area()) +
                             " is below 100x the largest analytic mean cell area (" + std::to_string(largest) +
                             "); finite-window bias likely");
  }

  std::vector<ReplicationResult> results(setup.replications);
  unsigned workers = setup.threads ? setup.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, setup.replications));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < setup.replications; r = next++) {
      try {
        results[r] = simulate_replication(setup, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = setup.replications;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t k_count = setup.tiers.size();
  const double conf = setup.confidence;
  stats.tiers.assign(k_count, {});
  for (std::size_t k = 0; k < k_count; ++k) {
    TierStatistics& ts = stats.tiers[k];
    std::vector<double> cells, area, area2, fraction;
    double large = 0.0;
    for (std::size_t r = 0; r < setup.replications; ++r) {
      const TierTotals& t = results[r].tiers[k];
      ts.per_replication.push_back(t);
      cells.push_back(t.cells);
      area.push_back(t.area);
      area2.push_back(t.area_squared);
      fraction.push_back(t.pixel_fraction);
      large += t.large_cells;
      ts.typical_areas.insert(ts.typical_areas.end(), results[r].cell_areas[k].begin(),
                              results[r].cell_areas[k].end());
      if (results[r].zero_cell.tier == k) ts.zero_cell_areas.push_back(results[r].zero_cell.area);
    }
    ts.typical_mean_area = ratio_estimate(area, cells, conf);
    ts.typical_second_moment = ratio_estimate(area2, cells, conf);
    ts.assoc_prob = mean_estimate(fraction, conf);
    ts.zero_cell_mean_area = mean_estimate(ts.zero_cell_areas, conf);
    ts.cells_observed = ts.typical_areas.size();
    ts.zero_cell_count = ts.zero_cell_areas.size();
    ts.large_cell_fraction = ts.cells_observed ? large / static_cast<double>(ts.cells_observed) : 0.0;
  }
  if (setup.keep_raw_cells) {
    for (std::size_t r = 0; r < setup.replications; ++r) {
      for (const CellRecord& c : results[r].cells) stats.raw_cells.push_back({r, c});
    }
  }
  return stats;
}

// Zero-cell mean versus the area-biased typical mean E[A^2]/E[A].
struct AreaBiasReport {
  std::size_t tier = 0;
  Estimate zero_cell_mean;
  Estimate biased_typical_mean;
  double z_statistic = 0.0;
  double p_value = 1.0;
  double relative_difference = 0.0;
  bool passed = false;
};

enum class BiasReference {
  kAreaBiased,  // E[A^2] / E[A]: the correct reference
  kUnbiased,    // E[A]: negative control
};

inline AreaBiasReport area_bias_check(const AreaStatistics& stats, std::size_t tier, double significance = 0.01,
                                      BiasReference reference = BiasReference::kAreaBiased) {
  if (tier >= stats.tiers.size()) throw InvalidArgument("tier index out of range");
  if (stats.replications < 100) {
    throw InsufficientDataError("area-bias check needs at least 100 replications, got " +
                                std::to_string(stats.replications));
  }
  const TierStatistics& ts = stats.tiers[tier];
  if (ts.zero_cell_count < 2) throw InsufficientDataError("fewer than two zero cells observed in this tier");

  std::vector<double> num, den;
  for (const auto& t : ts.per_replication) {
    num.push_back(reference == BiasReference::kAreaBiased ? t.area_squared : t.area);
    den.push_back(reference == BiasReference::kAreaBiased ? t.area : t.cells);
  }
  AreaBiasReport report;
  report.tier = tier;
  report.zero_cell_mean = ts.zero_cell_mean_area;
  report.biased_typical_mean = ratio_estimate(num, den, stats.confidence);

  const double zq_zero = student_t_quantile(stats.confidence, ts.zero_cell_count);
  const double zq_typ = student_t_quantile(stats.confidence, stats.replications);
  const double se_zero = report.zero_cell_mean.standard_error(zq_zero);
  const double se_typ = report.biased_typical_mean.standard_error(zq_typ);
  const double se = std::sqrt(se_zero * se_zero + se_typ * se_typ);
  const double diff = report.zero_cell_mean.value - report.biased_typical_mean.value;
  report.z_statistic = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
  report.p_value = normal_two_sided_p(report.z_statistic);
  report.relative_difference = std::fabs(diff) / report.biased_typical_mean.value;
  report.passed = report.p_value >= significance;
  return report;
}

// Asymptotic Kolmogorov tail with the Stephens small-sample correction.
inline double kolmogorov_p_value(double d, double n_eff) {
  const double en = std::sqrt(n_eff);
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0, prev = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) <= 1e-12 * std::fabs(sum) || std::fabs(term) <= 1e-300 ||
        (k > 1 && std::fabs(term) <= 1e-10 * prev)) {
      return std::clamp(2.0 * sum, 0.0, 1.0);
    }
    prev = std::fabs(term);
    sign = -sign;
  }
  return 1.0;  // series did not settle: lambda is tiny
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("two-sample test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, kolmogorov_p_value(d, na * nb / (na + nb))};
}

enum class TypicalWeighting {
  kAreaWeighted,  // correct: resample typical cells with probability ~ area
  kUnweighted,    // negative control
};

struct DistributionBiasReport {
  KsResult test;
  std::size_t zero_samples = 0;
  std::size_t resampled = 0;
  bool passed = false;
};

inline constexpr std::size_t kMinZeroSamples = 500;
inline constexpr std::size_t kMinTypicalSamples = 5000;

// Two-sample KS test of zero-cell areas against typical-cell areas resampled
// (with replacement) with weights proportional to area.
inline DistributionBiasReport distribution_bias_check(std::span<const double> zero_cell_samples,
                                                      std::span<const double> typical_cell_samples,
                                                      double significance = 0.01, Seed seed = 0,
                                                      TypicalWeighting weighting = TypicalWeighting::kAreaWeighted) {
  if (zero_cell_samples.size() < kMinZeroSamples) {
    throw InsufficientDataError("distribution check needs at least 500 zero-cell samples, got " +
                                std::to_string(zero_cell_samples.size()));
  }
  if (typical_cell_samples.size() < kMinTypicalSamples) {
    throw InsufficientDataError("distribution check needs at least 5000 typical-cell samples, got " +
                                std::to_string(typical_cell_samples.size()));
  }
  std::mt19937_64 engine(derive_stream(seed, 0, StreamPurpose::kResampling));
  const std::size_t m = std::min<std::size_t>(typical_cell_samples.size(), 50000);
  std::vector<double> resampled;
  resampled.reserve(m);
  if (weighting == TypicalWeighting::kAreaWeighted) {
    std::discrete_distribution<std::size_t> pick(typical_cell_samples.begin(), typical_cell_samples.end());
    for (std::size_t s = 0; s < m; ++s) resampled.push_back(typical_cell_samples[pick(engine)]);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, typical_cell_samples.size() - 1);
    for (std::size_t s = 0; s < m; ++s) resampled.push_back(typical_cell_samples[pick(engine)]);
  }
  DistributionBiasReport report;
  report.test = ks_two_sample({zero_cell_samples.begin(), zero_cell_samples.end()}, std::move(resampled));
  report.zero_samples = zero_cell_samples.size();
  report.resampled = m;
  report.passed = report.test.p_value >= significance;
  return report;
}

}  // namespace hetcell
