#pragma once

// Brute-force reference implementations for tests and debugging.
//
// These share only the geometry primitives and the random-stream derivation
// with the main path (so that gain draws coincide); the association loop and
// the moment estimator are written out independently.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetcell/association.hpp"
#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/pointprocess.hpp"
#include "hetcell/tessellation.hpp"
#include "hetcell/tier.hpp"

namespace hetcell::oracles {

inline constexpr std::size_t kMaxOraclePoints = 200;
inline constexpr std::size_t kMaxOracleResolution = 400;

// Double loop over pixels and APs; no pruning.
inline AssociationMap brute_force_map(const PointPattern& pattern, std::span<const TierConfig> tiers,
                                      AssociationStrategy strategy, GainFieldMode gain_mode, const Window& window,
                                      Seed gain_stream) {
  if (pattern.size() > kMaxOraclePoints || window.resolution() > kMaxOracleResolution) {
    throw InvalidArgument("instance too large for the brute-force oracle");
  }
  if (pattern.empty()) throw EmptyPatternError("brute-force oracle needs at least one access point");

  const std::size_t n_ap = pattern.size();
  std::vector<double> per_ap_gain(n_ap, 1.0);
  if (strategy != AssociationStrategy::kNearest && gain_mode == GainFieldMode::kPerAP) {
    for (std::size_t n = 0; n < n_ap; ++n) {
      per_ap_gain[n] = pattern.gain_marks.size() == n_ap
                           ? pattern.gain_marks[n]
                           : field_gain(tiers[pattern.tier_marks[n]].fading, gain_stream, n, 0);
    }
  }

  AssociationMap map{window, {}, {}};
  const std::size_t res = window.resolution();
  map.grid.assign(res * res, 0);
  map.cell_pixel_counts.assign(n_ap, 0);

  std::vector<double> received(n_ap);
  for (std::size_t row = 0; row < res; ++row) {
    for (std::size_t col = 0; col < res; ++col) {
      const Point y = window.pixel_center(col, row);
      const std::size_t pixel = window.pixel_index(col, row);
      std::size_t winner = 0;

      if (strategy == AssociationStrategy::kNearest) {
        double best = window.torus_distance(y, pattern.points[0]);
        for (std::size_t n = 1; n < n_ap; ++n) {
          const double d = window.torus_distance(y, pattern.points[n]);
          if (d < best) {
            best = d;
            winner = n;
          }
        }
      } else {
        for (std::size_t n = 0; n < n_ap; ++n) {
          const TierConfig& tier = tiers[pattern.tier_marks[n]];
          const double log_h =
              gain_mode == GainFieldMode::kPerAP
                  ? std::log(per_ap_gain[n])
                  : field_log_gain(tier.fading, gain_stream, n, static_cast<std::uint64_t>(pixel) + 1);
          const double d = window.torus_distance(y, pattern.points[n]);
          const double log_rx = std::log(tier.power) + log_h;
          received[n] = d == 0.0 ? INFINITY : log_rx - tier.path_loss_exponent * std::log(d);
        }
        if (strategy == AssociationStrategy::kMaxPower) {
          for (std::size_t n = 1; n < n_ap; ++n) {
            if (received[n] > received[winner]) winner = n;
          }
        } else {
          // Full SIR with the exact interference sum.
          for (double& v : received) v = std::exp(v);
          double total = 0.0;
          bool found_atom = false;
          for (std::size_t n = 0; n < n_ap && !found_atom; ++n) {
            if (std::isinf(received[n])) {
              winner = n;
              found_atom = true;
            }
            total += received[n];
          }
          if (!found_atom) {
            double best = -1.0;
            for (std::size_t n = 0; n < n_ap; ++n) {
              const double rest = total - received[n];
              const double sir = rest > 0.0 ? received[n] / rest : INFINITY;
              if (sir > best) {
                best = sir;
                winner = n;
              }
            }
          }
        }
      }
      map.grid[pixel] = static_cast<std::uint32_t>(winner);
      ++map.cell_pixel_counts[winner];
    }
  }
  return map;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Sample mean of H^delta and its standard error.
inline MonteCarloEstimate mc_fractional_moment(const FadingModel& model, double delta, std::size_t n_samples,
                                               Seed seed) {
  if (n_samples < 100000) throw InvalidArgument("Monte Carlo moment oracle needs at least 1e5 samples");
  CounterEngine engine(seed);
  // Welford accumulation.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double v = std::pow(sample_gain(model, engine), delta);
    const double delta_mean = v - mean;
    mean += delta_mean / static_cast<double>(i + 1);
    m2 += delta_mean * (v - mean);
  }
  const double var = m2 / static_cast<double>(n_samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

}  // namespace hetcell::oracles
