#pragma once

// Mean association areas, association probabilities and Campbell-type
// functionals of K-tier max-power networks on a Poisson AP process.
//
// With transformed densities  lt_k = lambda_k P_k^{2/a_k} E[H_k^{2/a_k}],
// the probability that a location at distance r from a typical tier-i AP is
// served by it is
//
//   p_i(r) = E_H[ exp(-pi sum_k lt_k r^{2 a_i / a_k} (P_i H)^{-2/a_k}) ],
//
// and the mean cell area is 2 pi int_0^inf r p_i(r) dr. For a common exponent
// a the integral has the closed form P_i^{2/a} E[H_i^{2/a}] / sum_k lt_k.
//
// Numerically the radial integral is written in t = log(r^2), where
//   2 pi r g(r) p_i(r) dr = pi g(e^{t/2}) e^t p_i(e^{t/2}) dt,
// and the expectation over H uses the gain rules of quadrature.hpp, refined
// until doubling the rule changes the result by less than kRuleTolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"
#include "hetcell/quadrature.hpp"
#include "hetcell/tier.hpp"

namespace hetcell {

inline constexpr double kRadialTolerance = 1e-13;
inline constexpr double kRuleTolerance = 1e-12;
// Integrand values below this fraction of the peak are treated as zero.
inline constexpr double kTailCutoff = 1e-17;

inline double transformed_density(const TierConfig& tier) {
  const double delta = 2.0 / tier.path_loss_exponent;
  return tier.density * std::pow(tier.power, delta) * fractional_moment(tier.fading, delta);
}

inline std::vector<double> transformed_densities(std::span<const TierConfig> tiers) {
  validate(tiers);
  std::vector<double> out;
  for (const auto& t : tiers) out.push_back(transformed_density(t));
  return out;
}

// Mean typical cell area per tier for a common path-loss exponent.
inline std::vector<double> mean_area_closed_form(std::span<const TierConfig> tiers) {
  validate(tiers);
  if (!equal_exponents(tiers)) {
    throw InvalidArgument("closed-form mean area needs a common path-loss exponent; use mean_area_integral");
  }
  const double delta = 2.0 / tiers.front().path_loss_exponent;
  std::vector<double> weight;
  double denominator = 0.0;
  for (const auto& t : tiers) {
    weight.push_back(std::pow(t.power, delta) * fractional_moment(t.fading, delta));
    denominator += t.density * weight.back();
  }
  if (!std::isfinite(denominator)) throw InvalidArgument("fractional moment is not finite");
  for (double& w : weight) w /= denominator;
  return weight;
}

struct RadialKernel {
  enum class Kind { kConstant, kPowerLaw };
  Kind kind = Kind::kConstant;
  double exponent = 0.0;  // g(r) = r^-exponent for kPowerLaw

  static RadialKernel constant() { return {}; }
  static RadialKernel power_law(double exponent) { return {Kind::kPowerLaw, exponent}; }

  double decay() const noexcept { return kind == Kind::kPowerLaw ? exponent : 0.0; }
};

namespace detail {

// pi * int_{t_lower}^{inf} e^{(1 - b/2) t} p_i(e^{t/2}) dt for one gain rule.
// `t_lower` is -inf when the integral starts at r = 0 (requires b < 2).
inline QuadratureResult radial_integral(std::span<const TierConfig> tiers, std::size_t i,
                                        std::span<const double> lt, const GainRule& rule, double kernel_decay,
                                        double t_lower) {
  const double growth = 1.0 - 0.5 * kernel_decay;
  const double a_i = tiers[i].path_loss_exponent;
  const double log_p_i = std::log(tiers[i].power);
  const std::size_t k_count = tiers.size();

  // Per (node, tier) constants: log(pi lt_k) - (2/a_k)(log P_i + log h_j).
  std::vector<double> offset(rule.weight.size() * k_count);
  std::vector<double> slope(k_count);
  for (std::size_t k = 0; k < k_count; ++k) slope[k] = a_i / tiers[k].path_loss_exponent;
  for (std::size_t j = 0; j < rule.weight.size(); ++j) {
    for (std::size_t k = 0; k < k_count; ++k) {
      offset[j * k_count + k] = std::log(std::numbers::pi * lt[k]) -
                                (2.0 / tiers[k].path_loss_exponent) * (log_p_i + rule.log_gain[j]);
    }
  }
  auto integrand = [&](double t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.weight.size(); ++j) {
      if (rule.weight[j] == 0.0) continue;
      double x = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) x += std::exp(slope[k] * t + offset[j * k_count + k]);
      sum += rule.weight[j] * std::exp(growth * t - x);
    }
    return std::numbers::pi * sum;
  };

  constexpr double kScanLimit = 400.0;
  constexpr double kStep = 0.25;
  const bool from_origin = !std::isfinite(t_lower);
  const double scan_lo = from_origin ? -kScanLimit : t_lower;
  if (scan_lo >= kScanLimit) return {};

  // Locate the support of the integrand on a coarse grid.
  std::vector<double> grid_t, grid_f;
  double peak = 0.0;
  for (double t = scan_lo; t <= kScanLimit; t += kStep) {
    grid_t.push_back(t);
    grid_f.push_back(integrand(t));
    peak = std::max(peak, grid_f.back());
  }
  if (!(peak > 0.0)) throw QuadratureError("radial integrand vanishes on the scanned range", 0.0);
  if (grid_f.back() > kTailCutoff * peak) {
    throw QuadratureError("radial integrand has not decayed at log(r^2) = 400", grid_f.back());
  }
  std::size_t first = 0, last = grid_f.size() - 1;
  while (first < grid_f.size() && grid_f[first] < kTailCutoff * peak) ++first;
  while (last > first && grid_f[last] < kTailCutoff * peak) --last;
  const double a = first == 0 ? scan_lo : grid_t[first - 1];
  const double b = std::min(kScanLimit, grid_t[last] + kStep);

  QuadratureResult r = integrate_panels(integrand, a, b, 2.0, kRadialTolerance);
  if (from_origin && first == 0) {
    // Below the scan the interference term is negligible: integrand ~ pi e^{growth t} p(t_lo).
    const double tail = integrand(scan_lo) / growth;
    r.value += tail;
    r.error_estimate += 1e-12 * tail;
  }
  return r;
}

inline QuadratureResult refined_radial_integral(std::span<const TierConfig> tiers, std::size_t i,
                                                double kernel_decay, double t_lower) {
  const std::vector<double> lt = transformed_densities(tiers);
  const FadingModel& model = tiers[i].fading;
  if (gain_rule_is_exact(model)) return radial_integral(tiers, i, lt, gain_rule(model, 1), kernel_decay, t_lower);

  std::size_t order = model.kind == FadingKind::kExponential ? 4 : 16;
  QuadratureResult prev = radial_integral(tiers, i, lt, gain_rule(model, order), kernel_decay, t_lower);
  constexpr std::size_t kMaxOrder = 1024;
  while (order < kMaxOrder) {
    order *= 2;
    const QuadratureResult next = radial_integral(tiers, i, lt, gain_rule(model, order), kernel_decay, t_lower);
    const double change = std::fabs(next.value - prev.value);
    if (change <= kRuleTolerance * std::fabs(next.value)) {
      return {next.value, next.error_estimate + change};
    }
    prev = next;
  }
  throw QuadratureError("gain expectation did not converge with " + std::to_string(kMaxOrder) + " nodes",
                        prev.error_estimate);
}

}  // namespace detail

// Mean area of a typical tier-i cell by numerical integration (any exponents).
inline QuadratureResult mean_area_integral(std::span<const TierConfig> tiers, std::size_t i) {
  validate(tiers);
  if (i >= tiers.size()) throw InvalidArgument("tier index out of range");
  return detail::refined_radial_integral(tiers, i, 0.0, -std::numeric_limits<double>::infinity());
}

inline std::vector<double> mean_areas(std::span<const TierConfig> tiers) {
  if (equal_exponents(tiers)) return mean_area_closed_form(tiers);
  std::vector<double> out;
  for (std::size_t i = 0; i < tiers.size(); ++i) out.push_back(mean_area_integral(tiers, i).value);
  return out;
}

// A_i = lambda_i * E_i[|C|]; closed form when exponents agree.
inline std::vector<double> association_probability(std::span<const TierConfig> tiers) {
  const std::vector<double> area = mean_areas(tiers);
  std::vector<double> a(area.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < area.size(); ++i) {
    a[i] = tiers[i].density * area[i];
    sum += a[i];
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw QuadratureError("association probabilities do not sum to one", std::fabs(sum - 1.0));
  }
  return a;
}

// Mean of sum_j g(|Y_j|) over users Y_j of an independent PPP (intensity
// user_density) falling in a typical tier-i cell, restricted to |Y_j| > inner_cutoff.
inline QuadratureResult campbell_functional(std::span<const TierConfig> tiers, std::size_t i, RadialKernel kernel,
                                            double user_density, double inner_cutoff = 0.0) {
  validate(tiers);
  if (i >= tiers.size()) throw InvalidArgument("tier index out of range");
  if (!(user_density > 0.0)) throw InvalidArgument("user density must be positive");
  if (!(inner_cutoff >= 0.0) || !std::isfinite(inner_cutoff)) throw InvalidArgument("inner cutoff must be >= 0");
  if (kernel.kind == RadialKernel::Kind::kPowerLaw && !(kernel.exponent >= 0.0)) {
    throw InvalidArgument("power-law kernel exponent must be >= 0");
  }
  const double decay = kernel.decay();
  if (decay >= 2.0 && inner_cutoff == 0.0) {
    throw DivergenceError("kernel r^-" + std::to_string(decay) +
                          " is not integrable at r = 0 in two dimensions (needs exponent < 2); "
                          "set a positive inner cutoff");
  }
  const double t_lower =
      inner_cutoff > 0.0 ? 2.0 * std::log(inner_cutoff) : -std::numeric_limits<double>::infinity();
  QuadratureResult r = detail::refined_radial_integral(tiers, i, decay, t_lower);
  r.value *= user_density;
  r.error_estimate *= user_density;
  return r;
}

struct AnalyticPrediction {
  std::vector<double> per_tier_mean_area;
  std::vector<double> per_tier_assoc_prob;
  std::vector<double> transformed_densities;
  std::optional<std::vector<double>> closed_form_mean_area;  // equal exponents only
  std::vector<QuadratureResult> quadrature_mean_area;
};

inline AnalyticPrediction predict(std::span<const TierConfig> tiers) {
  validate(tiers);
  AnalyticPrediction p;
  p.transformed_densities = transformed_densities(tiers);
  for (std::size_t i = 0; i < tiers.size(); ++i) p.quadrature_mean_area.push_back(mean_area_integral(tiers, i));
  if (equal_exponents(tiers)) {
    p.closed_form_mean_area = mean_area_closed_form(tiers);
    p.per_tier_mean_area = *p.closed_form_mean_area;
  } else {
    for (const auto& q : p.quadrature_mean_area) p.per_tier_mean_area.push_back(q.value);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    p.per_tier_assoc_prob.push_back(tiers[i].density * p.per_tier_mean_area[i]);
    sum += p.per_tier_assoc_prob.back();
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw QuadratureError("association probabilities do not sum to one", std::fabs(sum - 1.0));
  }
  return p;
}

}  // namespace hetcell
