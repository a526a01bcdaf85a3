#pragma once

// Channel gain laws H and their fractional moments E[H^delta].

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "hetcell/error.hpp"
#include "hetcell/random.hpp"

namespace hetcell {

enum class FadingKind { kDeterministic, kLogNormal, kExponential };

struct FadingModel {
  FadingKind kind = FadingKind::kDeterministic;
  double sigma = 0.0;  // natural-log standard deviation (LogNormal only)
  double scale = 1.0;  // mean gain (Exponential only)

  static FadingModel deterministic() { return {}; }
  static FadingModel lognormal(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw InvalidArgument("lognormal sigma must be finite and nonnegative");
    }
    return {FadingKind::kLogNormal, sigma, 1.0};
  }
  static FadingModel exponential(double scale = 1.0) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw InvalidArgument("exponential fading scale must be positive");
    }
    return {FadingKind::kExponential, 0.0, scale};
  }

  friend bool operator==(const FadingModel&, const FadingModel&) = default;
};

// How the gain field H_n(y) varies with the evaluation point y.
enum class GainFieldMode {
  kPerAP,               // one gain per AP, reused at every location
  kPerEvaluationPoint,  // independent gain per (AP, location)
};

inline std::string_view to_string(FadingKind kind) {
  switch (kind) {
    case FadingKind::kDeterministic: return "deterministic";
    case FadingKind::kLogNormal: return "lognormal";
    case FadingKind::kExponential: return "exponential";
  }
  return "?";
}

inline std::string_view to_string(GainFieldMode mode) {
  return mode == GainFieldMode::kPerAP ? "per_ap" : "per_evaluation_point";
}

inline void validate(const FadingModel& model) {
  switch (model.kind) {
    case FadingKind::kDeterministic: return;
    case FadingKind::kLogNormal:
      if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma)) throw InvalidArgument("lognormal sigma must be >= 0");
      return;
    case FadingKind::kExponential:
      if (!(model.scale > 0.0) || !std::isfinite(model.scale)) throw InvalidArgument("exponential scale must be > 0");
      return;
  }
}

// One draw of log H. Uses two 53-bit open-interval uniforms per draw
// (Box-Muller for the Gaussian log-gain, inversion for the exponential), so
// every draw is finite and bounded by gain_log_bounds().
template <class Engine>
double sample_log_gain(const FadingModel& model, Engine& engine) {
  switch (model.kind) {
    case FadingKind::kDeterministic:
      return 0.0;
    case FadingKind::kLogNormal: {
      const double u1 = uniform_open01(engine);
      const double u2 = uniform_open01(engine);
      return model.sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case FadingKind::kExponential:
      return std::log(-model.scale * std::log(uniform_open01(engine)));
  }
  return 0.0;
}

// One draw of H (strictly positive).
template <class Engine>
double sample_gain(const FadingModel& model, Engine& engine) {
  if (model.kind == FadingKind::kDeterministic) return 1.0;
  return std::exp(sample_log_gain(model, engine));
}

struct LogGainBounds {
  double lower;
  double upper;
};

// Range of log(sample_gain(model, .)) over every possible engine output.
inline LogGainBounds gain_log_bounds(const FadingModel& model) {
  constexpr double kSlack = 1e-9;
  const double u_min = 0x1.0p-54;
  switch (model.kind) {
    case FadingKind::kDeterministic:
      return {0.0, 0.0};
    case FadingKind::kLogNormal: {
      const double z_max = std::sqrt(-2.0 * std::log(u_min));
      const double r = model.sigma * z_max + kSlack;
      return {-r, r};
    }
    case FadingKind::kExponential: {
      const double ls = std::log(model.scale);
      return {ls + std::log(-std::log1p(-u_min)) - kSlack, ls + std::log(-std::log(u_min)) + kSlack};
    }
  }
  return {0.0, 0.0};
}

// Exact E[H^delta] for delta in (0, 1].
//   Deterministic: 1
//   LogNormal(s):  exp(delta^2 s^2 / 2)
//   Exponential(m): m^delta * Gamma(1 + delta)
inline double fractional_moment(const FadingModel& model, double delta) {
  validate(model);
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InvalidArgument("fractional moment order must lie in (0, 1], got " + std::to_string(delta));
  }
  switch (model.kind) {
    case FadingKind::kDeterministic: return 1.0;
    case FadingKind::kLogNormal: return std::exp(0.5 * delta * delta * model.sigma * model.sigma);
    case FadingKind::kExponential: return std::pow(model.scale, delta) * std::tgamma(1.0 + delta);
  }
  throw InvalidArgument("unsupported fading model");
}

}  // namespace hetcell
