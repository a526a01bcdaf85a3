#pragma once

// Stationary association strategies: which AP serves location y.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetcell/error.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/pointprocess.hpp"
#include "hetcell/tier.hpp"

namespace hetcell {

enum class AssociationStrategy { kMaxPower, kMaxSIR, kNearest };

inline std::string_view to_string(AssociationStrategy s) {
  switch (s) {
    case AssociationStrategy::kMaxPower: return "max_power";
    case AssociationStrategy::kMaxSIR: return "max_sir";
    case AssociationStrategy::kNearest: return "nearest";
  }
  return "?";
}

inline constexpr double kInfiniteScore = std::numeric_limits<double>::infinity();

// log(P H) - a log(d); +inf when the location coincides with the AP.
inline double log_received_power(double log_power_gain, double exponent, double distance) noexcept {
  if (distance == 0.0) return kInfiniteScore;
  return log_power_gain - exponent * std::log(distance);
}

// Per-AP (log(P H), a) pairs for a strategy; Nearest uses (0, 1) so that the
// score is -log(d).
struct LinkParameters {
  std::vector<double> log_power;
  std::vector<double> exponent;
};

inline LinkParameters link_parameters(const PointPattern& pattern, std::span<const TierConfig> tiers,
                                      AssociationStrategy strategy) {
  LinkParameters out;
  out.log_power.resize(pattern.size());
  out.exponent.resize(pattern.size());
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    if (strategy == AssociationStrategy::kNearest) {
      out.log_power[n] = 0.0;
      out.exponent[n] = 1.0;
    } else {
      const auto& tier = tiers[pattern.tier_marks.at(n)];
      out.log_power[n] = std::log(tier.power);
      out.exponent[n] = tier.path_loss_exponent;
    }
  }
  return out;
}

inline void check_inputs(const PointPattern& pattern, std::span<const TierConfig> tiers,
                         AssociationStrategy strategy, std::span<const double> gains) {
  if (pattern.empty()) throw EmptyPatternError("association needs at least one access point");
  if (pattern.tier_marks.size() != pattern.size()) throw InvalidArgument("tier marks do not match point count");
  if (strategy != AssociationStrategy::kNearest) {
    if (gains.size() != pattern.size()) throw InvalidArgument("gain vector does not match point count");
    for (double g : gains) {
      if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("gains must be positive and finite");
    }
    for (std::size_t mark : pattern.tier_marks) {
      if (mark >= tiers.size()) throw InvalidArgument("tier mark out of range");
    }
  }
}

// SIR of every AP given absolute received powers. A lone AP, or an AP at
// distance zero, gets +inf; all others next to an infinite power get 0.
inline std::vector<double> sir_from_powers(std::span<const double> power) {
  std::vector<double> sir(power.size(), 0.0);
  std::size_t infinite = power.size();
  double total = 0.0;
  for (std::size_t n = 0; n < power.size(); ++n) {
    if (std::isinf(power[n])) {
      infinite = n;
      break;
    }
    total += power[n];
  }
  if (infinite < power.size()) {
    sir[infinite] = kInfiniteScore;
    return sir;
  }
  for (std::size_t n = 0; n < power.size(); ++n) {
    const double interference = total - power[n];
    sir[n] = interference > 0.0 ? power[n] / interference : kInfiniteScore;
  }
  return sir;
}

// Score of every AP at y. MaxPower: log received power; Nearest: -log d;
// MaxSIR: linear signal-to-interference ratio. `gains` holds H_n(y) for each
// AP (ignored by Nearest).
inline std::vector<double> scores(Point y, const PointPattern& pattern, std::span<const TierConfig> tiers,
                                  AssociationStrategy strategy, std::span<const double> gains,
                                  const Window& window) {
  check_inputs(pattern, tiers, strategy, gains);
  const LinkParameters links = link_parameters(pattern, tiers, strategy);
  std::vector<double> s(pattern.size());
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    const double log_pg = strategy == AssociationStrategy::kNearest ? 0.0 : links.log_power[n] + std::log(gains[n]);
    s[n] = log_received_power(log_pg, links.exponent[n], window.torus_distance(y, pattern.points[n]));
  }
  if (strategy == AssociationStrategy::kMaxSIR) {
    for (double& v : s) v = std::exp(v);
    return sir_from_powers(s);
  }
  return s;
}

// Index of the first maximum (ties go to the smallest index).
inline std::size_t first_argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t n = 1; n < values.size(); ++n) {
    if (values[n] > values[best]) best = n;
  }
  return best;
}

// kappa(y): the AP maximizing the strategy's score.
inline std::size_t serving_ap(Point y, const PointPattern& pattern, std::span<const TierConfig> tiers,
                              AssociationStrategy strategy, std::span<const double> gains, const Window& window) {
  return first_argmax(scores(y, pattern, tiers, strategy, gains, window));
}

}  // namespace hetcell
