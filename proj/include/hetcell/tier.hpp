#pragma once

#include <cmath>
#include <span>
#include <string>

#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"

namespace hetcell {

// Physical parameters shared by every AP of one tier. Power is in linear
// units (watts); the dBm convention lives in the configuration layer.
struct TierConfig {
  double density = 1.0;             // APs per unit area
  double power = 1.0;               // transmit power, linear
  double path_loss_exponent = 4.0;  // must exceed 2
  FadingModel fading;

  friend bool operator==(const TierConfig&, const TierConfig&) = default;
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline void validate(const TierConfig& tier) {
  if (!(tier.density > 0.0) || !std::isfinite(tier.density)) {
    throw InvalidArgument("tier density must be positive, got " + std::to_string(tier.density));
  }
  if (!(tier.power > 0.0) || !std::isfinite(tier.power)) {
    throw InvalidArgument("tier power must be positive, got " + std::to_string(tier.power));
  }
  if (!(tier.path_loss_exponent > 2.0) || !std::isfinite(tier.path_loss_exponent)) {
    throw InvalidArgument("path-loss exponent must exceed 2, got " + std::to_string(tier.path_loss_exponent));
  }
  validate(tier.fading);
}

inline void validate(std::span<const TierConfig> tiers) {
  if (tiers.empty()) throw InvalidArgument("at least one tier is required");
  for (const auto& t : tiers) validate(t);
}

inline double total_density(std::span<const TierConfig> tiers) {
  double sum = 0.0;
  for (const auto& t : tiers) sum += t.density;
  return sum;
}

inline bool equal_exponents(std::span<const TierConfig> tiers) {
  for (const auto& t : tiers) {
    if (t.path_loss_exponent != tiers.front().path_loss_exponent) return false;
  }
  return true;
}

}  // namespace hetcell
