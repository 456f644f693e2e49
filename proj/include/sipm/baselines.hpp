#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sipm/barrier.hpp"
#include "sipm/bounds.hpp"
#include "sipm/problems.hpp"
#include "sipm/schedules.hpp"
#include "sipm/solver.hpp"

namespace sipm {

/// Clamp of x - alpha g onto [l, u].
inline Vector psgm_step(std::span<const double> x, std::span<const double> g, double alpha,
                        const Bounds& bounds) {
  check_dimension(bounds, x);
  check_dimension(bounds, g, "g");
  if (alpha < 0) throw Error(Errc::invalid_argument, "alpha must be nonnegative");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::clamp(x[i] - alpha * g[i], bounds.lower(i), bounds.upper(i));
  }
  return out;
}

inline constexpr double kThetaLinkCap = 1e6;

/// c = min over finite-sided coordinates of 1/(kappa + 2 mu1/(u_i - l_i)),
/// with 2 mu1/inf = 0; capped at kThetaLinkCap.
inline double c_constant(const Bounds& bounds, double kappa_inf, double mu1) {
  if (kappa_inf < 0 || !(mu1 > 0)) {
    throw Error(Errc::invalid_argument, "c_constant needs kappa >= 0 and mu1 > 0");
  }
  double c = kThetaLinkCap;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!bounds.has_lower(i) && !bounds.has_upper(i)) continue;
    const double gap = bounds.upper(i) - bounds.lower(i);
    const double denom = kappa_inf + (std::isinf(gap) ? 0.0 : 2.0 * mu1 / gap);
    if (denom > 0) c = std::min(c, 1.0 / denom);
  }
  return c;
}

/// x+ = P_{N(theta)}(x - alpha q) with alpha = 1/(ell_f + 2 mu theta^-2).
/// When c is given the link theta <= c mu is enforced.
inline Vector simplified_ipm_step(std::span<const double> x, std::span<const double> grad_f,
                                  const Bounds& bounds, double mu, double theta, double ell_f,
                                  std::optional<double> c = std::nullopt) {
  if (!(mu > 0) || !(theta > 0) || !(ell_f > 0)) {
    throw Error(Errc::invalid_argument, "mu, theta and ell_f must be positive");
  }
  if (c && theta > *c * mu * (1 + 1e-12)) {
    throw Error(Errc::theta_link_violation,
                "theta = " + std::to_string(theta) + " exceeds c mu = " + std::to_string(*c * mu));
  }
  const Vector q = barrier_gradient(grad_f, x, bounds, mu);
  const double alpha = 1.0 / (ell_f + 2.0 * mu / (theta * theta));
  Vector y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= alpha * q[i];
  return project_to_neighborhood(y, bounds, theta);
}

/// C mu_k / (1 - sqrt(1 - alpha_k psi)) with alpha_k = 1/(ell_f + 2 c^-2 / mu_k).
/// 1 - sqrt(1 - e) is evaluated as e / (1 + sqrt(1 - e)) to avoid cancellation.
inline Vector recurrence_ratio(std::span<const double> mu_seq, double c, double psi,
                               double ell_f, double C) {
  if (!(c > 0) || !(psi > 0) || !(ell_f > 0) || C < 0) {
    throw Error(Errc::invalid_argument, "recurrence_ratio needs c, psi, ell_f > 0 and C >= 0");
  }
  Vector out;
  out.reserve(mu_seq.size());
  for (double mu : mu_seq) {
    if (!(mu > 0)) throw Error(Errc::invalid_argument, "mu_k must be positive");
    const double alpha = 1.0 / (ell_f + 2.0 / (c * c * mu));
    const double e = alpha * psi;
    if (e > 1.0) {
      throw Error(Errc::domain_error, "alpha_k psi = " + std::to_string(e) + " exceeds 1");
    }
    const double one_minus_v = e / (1.0 + std::sqrt(1.0 - e));
    out.push_back(C * mu / one_minus_v);
  }
  return out;
}

/// Closed-form limit of recurrence_ratio for mu_k -> 0.
inline double recurrence_limit(double c, double psi, double C) { return 4.0 * C / (c * c * psi); }

enum class BaselineKind { psgm, simplified_ipm };
enum class ScheduleLink { match_sipm_endpoints, explicit_steps };

/// alpha_k = A s_k^p with s_k = mu_k / mu1, A and p chosen so that the
/// first and last steps equal alpha_first and alpha_last. A constant s gives
/// a constant step alpha_first.
inline Vector psgm_step_sizes(const Schedule& schedule, std::size_t maxiter, double alpha_first,
                              double alpha_last) {
  if (!(alpha_first > 0) || !(alpha_last > 0)) {
    throw Error(Errc::invalid_argument, "endpoint step sizes must be positive");
  }
  Vector steps(maxiter, alpha_first);
  if (maxiter < 2) return steps;
  const double mu1 = schedule_mu1(schedule);
  const double s_last = mu_at(schedule, maxiter) / mu1;
  if (s_last == 1.0) return steps;
  const double p = std::log(alpha_last / alpha_first) / std::log(s_last);
  for (std::size_t k = 1; k <= maxiter; ++k) {
    steps[k - 1] = alpha_first * std::pow(mu_at(schedule, k) / mu1, p);
  }
  steps.back() = alpha_last;
  return steps;
}

struct BaselineConfig {
  BaselineKind kind = BaselineKind::psgm;
  Setting mode = Setting::deterministic;
  std::size_t maxiter = 100;
  std::uint64_t seed = 0;
  double batch_fraction = 0.01;
  bool keep_records = false;
  // psgm
  Vector step_schedule;
  ScheduleLink schedule_link = ScheduleLink::match_sipm_endpoints;
  // simplified_ipm: theta_k = c mu_k
  Schedule mu_schedule = PowerSchedule{};
  double ell_f = 1.0;
  double kappa_inf = 1.0;
  std::optional<double> theta_link_c;
};

/// Runs PSGM or the simplified projection variant; same result schema as
/// run_sipm. Stochastic runs draw the same batch sequence as run_sipm for an
/// equal seed.
inline RunResult run_baseline(const Objective& objective, const Bounds& bounds,
                              const BaselineConfig& config, std::span<const double> x1) {
  check_dimension(bounds, x1, "x1");
  if (objective.dimension() != bounds.size()) {
    throw Error(Errc::dimension_mismatch, "objective and bounds differ in dimension");
  }
  const bool psgm = config.kind == BaselineKind::psgm;
  if (psgm && config.step_schedule.size() < config.maxiter) {
    throw Error(Errc::invalid_argument, "PSGM step schedule shorter than maxiter");
  }
  double c = 0.0;
  if (!psgm) {
    require_interior(x1, bounds, "run_baseline");
    c = config.theta_link_c.value_or(
        c_constant(bounds, config.kappa_inf, schedule_mu1(config.mu_schedule)));
  }

  std::optional<BatchSampler> sampler;
  if (config.mode == Setting::stochastic && objective.sample_count() > 0) {
    sampler.emplace(objective.sample_count(),
                    batch_size_for(objective.sample_count(), config.batch_fraction),
                    config.seed);
  }

  RunResult result;
  Vector x(x1.begin(), x1.end());
  double mu_last = psgm ? 0.0 : schedule_mu1(config.mu_schedule);
  for (std::size_t k = 1; k <= config.maxiter; ++k) {
    Vector g;
    if (sampler) {
      const auto batch = sampler->next();
      g = objective.stochastic_gradient(x, batch);
    } else {
      g = objective.gradient(x);
    }
    IterationRecord r;
    r.k = k;
    r.gamma_k = 1.0;
    if (psgm) {
      r.alpha_k = config.step_schedule[k - 1];
      double gg = 0.0;
      for (double v : g) gg += v * v;
      r.q_norm = std::sqrt(gg);
      x = psgm_step(x, g, r.alpha_k, bounds);
    } else {
      r.mu_k = mu_at(config.mu_schedule, k);
      r.theta_k = c * r.mu_k;
      r.alpha_k = 1.0 / (config.ell_f + 2.0 * r.mu_k / (r.theta_k * r.theta_k));
      const Vector q = barrier_gradient(g, x, bounds, r.mu_k);
      double qq = 0.0;
      for (double v : q) qq += v * v;
      r.q_norm = std::sqrt(qq);
      x = simplified_ipm_step(x, g, bounds, r.mu_k, r.theta_k, config.ell_f, c);
      mu_last = r.mu_k;
    }
    if (k == 1) result.first_alpha = r.alpha_k;
    result.last_alpha = r.alpha_k;
    if (config.keep_records) result.records.push_back(r);
    ++result.iterations;
  }

  result.final_x = x;
  const Vector g = objective.gradient(x);
  result.final_objective = objective.value(x);
  result.final_projected_grad_norm = projected_gradient_norm(x, g, bounds);
  if (!psgm && strictly_interior(x, bounds)) {
    result.final_kkt = kkt_certificate(x, g, bounds, mu_last);
  }
  return result;
}

}  // namespace sipm
