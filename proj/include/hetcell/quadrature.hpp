#pragma once

// Quadrature building blocks: Gauss-Hermite nodes, discretized gain laws and
// an adaptive panel integrator.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"

namespace hetcell {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // for the weight function exp(-x^2)
};

// n-point Gauss-Hermite rule. Nodes are eigenvalues of the Jacobi matrix
// (zero diagonal, off-diagonal sqrt(k/2)) found by Sturm bisection; weights
// are 1 / sum_k q_k(x)^2 over the orthonormal Hermite polynomials.
inline GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n == 0) throw InvalidArgument("Gauss-Hermite rule needs at least one node");
  const double nd = static_cast<double>(n);

  auto count_above = [n](double x) {
    std::size_t below = 0;
    double d = -x;
    for (std::size_t k = 1;; ++k) {
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++below;
      if (k == n) break;
      d = -x - (static_cast<double>(k) / 2.0) / d;
    }
    return n - below;
  };

  auto christoffel_weight = [n](double x) {
    double q_prev = 0.0, q = std::pow(std::numbers::pi, -0.25);
    double sum = q * q, log_scale = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double jd = static_cast<double>(j);
      const double next = x * std::sqrt(2.0 / jd) * q - std::sqrt((jd - 1.0) / jd) * q_prev;
      q_prev = q;
      q = next;
      sum += q * q;
      if (std::fabs(q) > 1e100) {
        q *= 1e-100;
        q_prev *= 1e-100;
        sum *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    return std::exp(-std::log(sum) - log_scale);
  };

  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double bound = std::sqrt(2.0 * nd + 1.0) + 1.0;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // i-th largest eigenvalue: count_above(lo) > i >= count_above(hi).
    double lo = 0.0, hi = bound;
    if (n % 2 == 1 && i == n / 2) {
      lo = hi = 0.0;
    }
    while (hi - lo > 0.0) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (count_above(mid) > i ? lo : hi) = mid;
    }
    const double z = 0.5 * (lo + hi);
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = rule.weights[n - 1 - i] = christoffel_weight(z);
  }
  return rule;
}

// Discrete law of log H: E[f(H)] ~ sum_j weight[j] * f(exp(log_gain[j])).
struct GainRule {
  std::vector<double> log_gain;
  std::vector<double> weight;
};

// `order` is the refinement level: Gauss-Hermite nodes for lognormal gains,
// composite Gauss-Legendre panels in log-gain for exponential gains.
inline GainRule gain_rule(const FadingModel& model, std::size_t order) {
  GainRule rule;
  switch (model.kind) {
    case FadingKind::kDeterministic:
      rule.log_gain = {0.0};
      rule.weight = {1.0};
      return rule;
    case FadingKind::kLogNormal: {
      if (model.sigma == 0.0) {
        rule.log_gain = {0.0};
        rule.weight = {1.0};
        return rule;
      }
      const GaussHermiteRule gh = gauss_hermite(order);
      const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
      for (std::size_t j = 0; j < order; ++j) {
        rule.log_gain.push_back(model.sigma * std::numbers::sqrt2 * gh.nodes[j]);
        rule.weight.push_back(gh.weights[j] * inv_sqrt_pi);
      }
      return rule;
    }
    case FadingKind::kExponential: {
      // log H = log(scale) + T with density exp(t - e^t); the mass outside
      // [-40, log 40] is below 1e-17.
      using Legendre = boost::math::quadrature::gauss<double, 20>;
      const double lo = -40.0, hi = std::log(40.0);
      const std::size_t panels = order;
      const double width = (hi - lo) / static_cast<double>(panels);
      const auto& x = Legendre::abscissa();
      const auto& w = Legendre::weights();
      auto add = [&](double t, double wt) {
        rule.log_gain.push_back(std::log(model.scale) + t);
        rule.weight.push_back(wt * std::exp(t - std::exp(t)));
      };
      for (std::size_t p = 0; p < panels; ++p) {
        const double mid = lo + (static_cast<double>(p) + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t k = 0; k < x.size(); ++k) {
          if (x[k] == 0.0) {
            add(mid, half * w[k]);
          } else {
            add(mid + half * x[k], half * w[k]);
            add(mid - half * x[k], half * w[k]);
          }
        }
      }
      return rule;
    }
  }
  return rule;
}

inline bool gain_rule_is_exact(const FadingModel& model) {
  return model.kind == FadingKind::kDeterministic || (model.kind == FadingKind::kLogNormal && model.sigma == 0.0);
}

// Adaptive Gauss-Kronrod over [a, b], split into panels of at most
// `panel_width` so that narrow features far apart are all resolved.
template <class F>
QuadratureResult integrate_panels(const F& f, double a, double b, double panel_width, double rel_tol) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const auto panels = static_cast<std::size_t>(std::ceil((b - a) / panel_width));
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + static_cast<double>(p) * width;
    const double hi = p + 1 == panels ? b : lo + width;
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, rel_tol, &err);
    out.value += v;
    out.error_estimate += err;
  }
  return out;
}

}  // namespace hetcell
