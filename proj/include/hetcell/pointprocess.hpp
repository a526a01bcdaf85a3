#pragma once

// Marked Poisson point processes of access points on the torus.

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/random.hpp"
#include "hetcell/tier.hpp"

namespace hetcell {

// One realization of AP locations with marks. Tier marks are zero-based
// indices into the tier list; gain marks are the per-AP gains used in
// GainFieldMode::kPerAP (empty until draw_gain_marks() is called).
struct PointPattern {
  std::vector<Point> points;
  std::vector<std::size_t> tier_marks;
  std::vector<double> gain_marks;
  Seed seed = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

inline constexpr int kMaxEmptyResamples = 16;

// Homogeneous PPP of intensity total_density on the window. Count is
// Poisson(total_density * |W|), positions i.i.d. uniform. An empty draw is
// resampled (up to kMaxEmptyResamples times) from the same stream.
inline PointPattern sample_ppp(double total_density, const Window& window, Seed seed) {
  if (!(total_density > 0.0) || !std::isfinite(total_density)) {
    throw InvalidArgument("point density must be positive, got " + std::to_string(total_density));
  }
  std::mt19937_64 engine(seed);
  std::poisson_distribution<long long> count_dist(total_density * window.area());
  std::uniform_real_distribution<double> coord(0.0, window.side_length());

  long long count = 0;
  for (int attempt = 0; attempt <= kMaxEmptyResamples && count == 0; ++attempt) {
    count = count_dist(engine);
  }
  if (count == 0) {
    throw EmptyPatternError("point process produced no points after " + std::to_string(kMaxEmptyResamples) +
                            " resamples; increase density or window size");
  }

  PointPattern pattern;
  pattern.seed = seed;
  pattern.points.reserve(static_cast<std::size_t>(count));
  for (long long n = 0; n < count; ++n) {
    const double x = coord(engine);
    const double y = coord(engine);
    pattern.points.push_back(window.wrap(Point{x, y}));
  }
  pattern.tier_marks.assign(pattern.points.size(), 0);
  return pattern;
}

inline void validate_probabilities(std::span<const double> p) {
  if (p.empty()) throw InvalidArgument("tier fraction vector is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("tier fractions must be finite and nonnegative");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("tier fractions must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

// Independent thinning: each point gets tier k with probability p[k].
inline PointPattern assign_tiers(PointPattern pattern, std::span<const double> tier_fractions, Seed seed) {
  validate_probabilities(tier_fractions);
  std::mt19937_64 engine(seed);
  std::discrete_distribution<std::size_t> pick(tier_fractions.begin(), tier_fractions.end());
  pattern.tier_marks.resize(pattern.size());
  for (auto& mark : pattern.tier_marks) {
    mark = tier_fractions.size() == 1 ? 0 : pick(engine);
  }
  return pattern;
}

inline std::vector<double> tier_fractions(std::span<const TierConfig> tiers) {
  const double total = total_density(tiers);
  std::vector<double> p;
  p.reserve(tiers.size());
  for (const auto& t : tiers) p.push_back(t.density / total);
  // Absorb rounding so the vector sums to one within validate_probabilities' tolerance.
  double rest = 1.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) rest -= p[k];
  p.back() = rest < 0.0 ? 0.0 : rest;
  return p;
}

// log H_ap(location) from a counter stream: location 0 is the per-AP draw,
// pixel index + 1 the per-evaluation-point draw.
inline double field_log_gain(const FadingModel& model, Seed gain_stream, std::size_t ap, std::uint64_t location) {
  if (model.kind == FadingKind::kDeterministic) return 0.0;
  CounterEngine engine(derive_substream(derive_substream(gain_stream, ap), location));
  return sample_log_gain(model, engine);
}

inline double field_gain(const FadingModel& model, Seed gain_stream, std::size_t ap, std::uint64_t location) {
  if (model.kind == FadingKind::kDeterministic) return 1.0;
  return std::exp(field_log_gain(model, gain_stream, ap, location));
}

// Fills gain_marks with one gain per AP, drawn from its tier's fading law.
inline void draw_gain_marks(PointPattern& pattern, std::span<const TierConfig> tiers, Seed gain_stream) {
  pattern.gain_marks.resize(pattern.size());
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    pattern.gain_marks[n] = field_gain(tiers[pattern.tier_marks[n]].fading, gain_stream, n, 0);
  }
}

// Full marked realization for one replication: PPP of the summed density,
// thinned into tiers, with per-AP gain marks.
inline PointPattern sample_marked_pattern(std::span<const TierConfig> tiers, const Window& window, Seed master,
                                          std::uint64_t replication) {
  validate(tiers);
  PointPattern pattern =
      sample_ppp(total_density(tiers), window, derive_stream(master, replication, StreamPurpose::kPoints));
  const auto p = tier_fractions(tiers);
  pattern = assign_tiers(std::move(pattern), p, derive_stream(master, replication, StreamPurpose::kTiers));
  draw_gain_marks(pattern, tiers, derive_stream(master, replication, StreamPurpose::kGains));
  return pattern;
}

// Same configuration translated by `shift` on the torus (marks unchanged).
inline PointPattern translate(PointPattern pattern, Point shift, const Window& window) {
  for (auto& p : pattern.points) p = window.wrap(Point{p.x + shift.x, p.y + shift.y});
  return pattern;
}

}  // namespace hetcell
