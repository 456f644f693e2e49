#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "sipm/bounds.hpp"
#include "sipm/schedules.hpp"

namespace sipm {

/// a = min_L (x_i - l_i) min{x_i - l_i, xbar_i - l_i}, b likewise on U.
/// Either is +inf when its index set is empty.
struct SlackProducts {
  double a = kInf;
  double b = kInf;
};

inline SlackProducts slack_products(std::span<const double> x,
                                    std::span<const double> xbar,
                                    const Bounds& bounds) {
  check_dimension(bounds, xbar, "xbar");
  require_interior(x, bounds, "slack_products");
  require_interior(xbar, bounds, "slack_products");
  SlackProducts s;
  for (std::size_t i : bounds.lower_indices()) {
    const double ai = x[i] - bounds.lower(i);
    s.a = std::min(s.a, ai * std::min(ai, xbar[i] - bounds.lower(i)));
  }
  for (std::size_t i : bounds.upper_indices()) {
    const double bi = bounds.upper(i) - x[i];
    s.b = std::min(s.b, bi * std::min(bi, bounds.upper(i) - xbar[i]));
  }
  return s;
}

/// Lipschitz constant of the barrier gradient on the segment [x, xbar]:
/// ell_f + mu/a + mu/b with mu/inf = 0.
inline double local_lipschitz(double mu, std::span<const double> x,
                              std::span<const double> xbar,
                              const Bounds& bounds, double ell_f) {
  const SlackProducts s = slack_products(x, xbar, bounds);
  return ell_f + mu / s.a + mu / s.b;
}

/// Largest gamma in [0, gamma_max] with x + gamma scale d in N(theta).
/// Returns 0 when x sits on the boundary of N(theta) and d points out.
inline double ratio_test(std::span<const double> x, std::span<const double> d,
                         double scale, const Bounds& bounds, double theta,
                         double gamma_max) {
  check_dimension(bounds, x);
  check_dimension(bounds, d, "direction");
  if (!(scale > 0)) throw Error(Errc::invalid_argument, "scale must be positive");
  double gamma = gamma_max;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = scale * d[i];
    if (step < 0 && bounds.has_lower(i)) {
      gamma = std::min(gamma, (bounds.lower(i) + theta - x[i]) / step);
    } else if (step > 0 && bounds.has_upper(i)) {
      gamma = std::min(gamma, (bounds.upper(i) - theta - x[i]) / step);
    }
  }
  return std::clamp(gamma, 0.0, gamma_max);
}

/// gamma_{k,min} = min{1, lambda (mu Delta/2 / (mu + K Delta/2) - theta_k)
///                        / (alpha (K + mu/theta_{k-1}))}
/// K = kappa (deterministic, alpha = alpha_k) or kappa + sigma (stochastic,
/// alpha = alpha_max). Clamped below at 0.
inline double gamma_min_bound(double lambda_min, double mu, double delta,
                              double gradient_bound, double theta_k,
                              double theta_prev, double alpha) {
  if (std::isinf(alpha)) return 0.0;
  const double reach =
      0.5 * mu * delta / (mu + 0.5 * gradient_bound * delta) - theta_k;
  const double value =
      lambda_min * reach / (alpha * (gradient_bound + mu / theta_prev));
  return std::clamp(value, 0.0, 1.0);
}

struct StepContext {
  Setting setting = Setting::deterministic;
  std::size_t k = 1;
  double mu = 1.0;
  double theta = 0.1;       // theta_k
  double theta_prev = 0.1;  // theta_{k-1}
  double t_alpha = 0.0;
  double alpha_buff = kInf;
  double gamma_buff = kInf;
};

/// Lipschitz estimate and gradient-bound constants used by the step rule.
struct ProblemConstants {
  double ell_f = 1.0;
  double kappa_inf = 1.0;
  double sigma_inf = 0.0;
  double delta = 2.0;
};

struct StepSizeBundle {
  double lambda_min = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double alpha_pre = 0.0;
  double gamma_bar = 0.0;
  double ell_k = 0.0;
  double alpha_k = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 1.0;
  Vector direction;
};

/// Evaluates the step-size rule in order: alpha_min, alpha_max, alpha_pre,
/// d = -H^-1 q, gamma_bar, ell_k, alpha_k, gamma_min, gamma_max.
/// In deterministic mode gamma_max is 1.
inline StepSizeBundle step_size_bundle(std::span<const double> x,
                                       std::span<const double> q,
                                       std::span<const double> h_diag,
                                       const StepContext& ctx,
                                       const ProblemConstants& c,
                                       const Bounds& bounds) {
  check_dimension(bounds, q, "q");
  check_dimension(bounds, h_diag, "H");
  require_interior(x, bounds, "step_size_bundle");
  if (!in_neighborhood(x, bounds, ctx.theta_prev)) {
    throw Error(Errc::not_in_prior_neighborhood,
                "x_k is outside N(theta_{k-1}) at k = " + std::to_string(ctx.k));
  }
  StepSizeBundle s;
  s.lambda_min = kInf;
  for (double h : h_diag) {
    if (!(h > 0)) throw Error(Errc::invalid_argument, "H must be positive");
    s.lambda_min = std::min(s.lambda_min, h);
  }
  const double scaled_lambda =
      s.lambda_min * std::pow(static_cast<double>(ctx.k), ctx.t_alpha);

  s.alpha_min = scaled_lambda / (c.ell_f + 2.0 * ctx.mu / (ctx.theta * ctx.theta));
  s.alpha_max = s.alpha_min + ctx.alpha_buff;

  const SlackProducts self = slack_products(x, x, bounds);
  s.alpha_pre = scaled_lambda / (c.ell_f + ctx.mu / self.a + ctx.mu / self.b);

  s.direction.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) s.direction[i] = -q[i] / h_diag[i];

  const bool stochastic = ctx.setting == Setting::stochastic;
  const double gradient_bound = stochastic ? c.kappa_inf + c.sigma_inf : c.kappa_inf;
  if (stochastic) {
    s.gamma_min = gamma_min_bound(s.lambda_min, ctx.mu, c.delta, gradient_bound,
                                  ctx.theta, ctx.theta_prev, s.alpha_max);
    s.gamma_max = std::min(1.0, s.gamma_min + ctx.gamma_buff);
  } else {
    s.gamma_max = 1.0;
  }

  s.gamma_bar =
      ratio_test(x, s.direction, s.alpha_pre, bounds, ctx.theta, s.gamma_max);
  Vector xbar(x.begin(), x.end());
  for (std::size_t i = 0; i < xbar.size(); ++i) {
    xbar[i] += s.gamma_bar * s.alpha_pre * s.direction[i];
  }
  s.ell_k = local_lipschitz(ctx.mu, x, xbar, bounds, c.ell_f);
  s.alpha_k = std::min(scaled_lambda / s.ell_k, s.alpha_max);

  if (!stochastic) {
    s.gamma_min = gamma_min_bound(s.lambda_min, ctx.mu, c.delta, gradient_bound,
                                  ctx.theta, ctx.theta_prev, s.alpha_k);
  }
  return s;
}

}  // namespace sipm
