#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sipm/barrier.hpp"
#include "sipm/bounds.hpp"
#include "sipm/problems.hpp"
#include "sipm/schedules.hpp"
#include "sipm/step_size.hpp"

namespace sipm {

enum class HkStrategy { practical, identity, custom };
enum class AuditLevel { off, invariants, full_trace };

struct HkDiagonal {
  Vector diag;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Diagonal scaling H_k.
///   practical: ell_bar + mu/(x - l)^2 + mu/(u - x)^2 per coordinate
///   identity:  all ones
///   custom:    the given diagonal, checked against [lambda_lo, lambda_hi]
inline HkDiagonal build_hk(std::span<const double> x, const Bounds& bounds, double mu,
                           double ell_bar, HkStrategy strategy,
                           std::span<const double> custom = {}, double lambda_lo = 0.0,
                           double lambda_hi = kInf) {
  require_interior(x, bounds, "build_hk");
  HkDiagonal h;
  switch (strategy) {
    case HkStrategy::practical:
      h.diag.assign(x.size(), ell_bar);
      for (std::size_t i : bounds.lower_indices()) {
        const double s = x[i] - bounds.lower(i);
        h.diag[i] += mu / (s * s);
      }
      for (std::size_t i : bounds.upper_indices()) {
        const double s = bounds.upper(i) - x[i];
        h.diag[i] += mu / (s * s);
      }
      break;
    case HkStrategy::identity:
      h.diag.assign(x.size(), 1.0);
      break;
    case HkStrategy::custom:
      check_dimension(bounds, custom, "custom H");
      h.diag.assign(custom.begin(), custom.end());
      for (double v : h.diag) {
        if (!(v > 0) || v < lambda_lo || v > lambda_hi) {
          throw Error(Errc::eigenvalue_bound_violation,
                      "custom H entry " + std::to_string(v) + " outside [" +
                          std::to_string(lambda_lo) + ", " + std::to_string(lambda_hi) + "]");
        }
      }
      break;
  }
  h.lambda_min = *std::min_element(h.diag.begin(), h.diag.end());
  h.lambda_max = *std::max_element(h.diag.begin(), h.diag.end());
  return h;
}

struct Constants {
  double ell_f = 1.0;
  double kappa_inf = 1.0;
  double sigma_inf = 0.0;
};

struct SolverConfig {
  Setting mode = Setting::deterministic;
  ParamMode param_mode = ParamMode::practical;
  Schedule schedule = PowerSchedule{};
  BufferSequences buffers;
  Constants constants;
  double delta_cap = 100.0;
  std::size_t maxiter = 100;
  std::uint64_t seed = 0;
  double batch_fraction = 0.01;
  HkStrategy hk = HkStrategy::practical;
  Vector custom_h;
  double lambda_lo = 0.0;
  double lambda_hi = kInf;
  AuditLevel audit = AuditLevel::off;
  // Keep per-iteration records without auditing (full_trace always keeps them).
  bool keep_records = false;
  // Throw InvariantViolation on the first failed audit check instead of
  // collecting it into RunResult::violations.
  bool strict_audit = true;
  // chi for the shifted barrier diagnostics; 0 selects default_chi(bounds).
  double chi = 0.0;

  /// Practical mode and staircase schedules use t_alpha = 0.
  double t_alpha() const {
    if (param_mode == ParamMode::practical) return 0.0;
    if (const auto* p = std::get_if<PowerSchedule>(&schedule)) return p->exponents.t_alpha;
    return 0.0;
  }
};

struct IterationRecord {
  std::size_t k = 0;
  double mu_k = 0.0;
  double theta_k = 0.0;
  double alpha_k = 0.0;
  double gamma_k = 0.0;
  double ell_k = 0.0;
  double q_norm = 0.0;
  double phi_tilde = std::numeric_limits<double>::quiet_NaN();
  bool stalled = false;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double alpha_pre = 0.0;
  double gamma_bar = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double lambda_min = 0.0;
};

struct AuditViolation {
  std::size_t k = 0;
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RunResult {
  Vector final_x;
  std::vector<IterationRecord> records;
  double final_objective = 0.0;
  double final_projected_grad_norm = 0.0;
  // Absent for iterates on the boundary (projection baselines).
  std::optional<KktCertificate> final_kkt;
  std::size_t stall_count = 0;
  // Nominal step sizes alpha_1 and alpha_maxiter, used to link baselines.
  double first_alpha = 0.0;
  double last_alpha = 0.0;
  std::size_t iterations = 0;
  std::size_t audited_iterations = 0;
  std::vector<AuditViolation> violations;
};

struct SolverState {
  Vector x;
  std::size_t k = 1;
};

struct StepOutcome {
  SolverState next;
  IterationRecord record;
  StepSizeBundle bundle;
  Vector q;
  Vector h;
};

/// One iteration: q from the oracle gradient, d = -H^-1 q, the step-size
/// bundle, the ratio test for gamma_k and x_{k+1} = x_k + gamma_k alpha_k d_k.
class SipmStepper {
 public:
  SipmStepper(const SolverConfig& config, const Bounds& bounds)
      : config_(config), bounds_(bounds) {
    constants_.ell_f = config.constants.ell_f;
    constants_.kappa_inf = config.constants.kappa_inf;
    constants_.sigma_inf = config.mode == Setting::stochastic ? config.constants.sigma_inf : 0.0;
    constants_.delta = range_gap(bounds, config.delta_cap);
  }

  const ProblemConstants& constants() const { return constants_; }
  const Bounds& bounds() const { return bounds_; }
  const SolverConfig& config() const { return config_; }

  StepOutcome step(const SolverState& state, std::span<const double> oracle_gradient) const {
    const std::size_t k = state.k;
    StepContext ctx;
    ctx.setting = config_.mode;
    ctx.k = k;
    ctx.mu = mu_at(config_.schedule, k);
    ctx.theta = theta_at(config_.schedule, k);
    ctx.theta_prev = theta_at(config_.schedule, k - 1);
    ctx.t_alpha = config_.t_alpha();
    ctx.alpha_buff = config_.buffers.alpha_buff(k);
    ctx.gamma_buff = config_.buffers.gamma_buff(k);

    StepOutcome out;
    out.q = barrier_gradient(oracle_gradient, state.x, bounds_, ctx.mu);
    const HkDiagonal h = build_hk(state.x, bounds_, ctx.mu, constants_.ell_f, config_.hk,
                                  config_.custom_h, config_.lambda_lo, config_.lambda_hi);
    out.h = h.diag;
    out.bundle = step_size_bundle(state.x, out.q, h.diag, ctx, constants_, bounds_);
    const StepSizeBundle& b = out.bundle;

    const double gamma =
        ratio_test(state.x, b.direction, b.alpha_k, bounds_, ctx.theta, b.gamma_max);
    out.next.k = k + 1;
    out.next.x = state.x;
    if (gamma > 0) {
      for (std::size_t i = 0; i < out.next.x.size(); ++i) {
        out.next.x[i] += gamma * b.alpha_k * b.direction[i];
      }
      // The ratio test is exact up to division rounding; snap the last ulp.
      out.next.x = project_to_neighborhood(out.next.x, bounds_, ctx.theta);
    }

    IterationRecord& r = out.record;
    r.k = k;
    r.mu_k = ctx.mu;
    r.theta_k = ctx.theta;
    r.alpha_k = b.alpha_k;
    r.gamma_k = gamma;
    r.ell_k = b.ell_k;
    double qq = 0.0;
    for (double v : out.q) qq += v * v;
    r.q_norm = std::sqrt(qq);
    r.stalled = gamma == 0.0;
    r.alpha_min = b.alpha_min;
    r.alpha_max = b.alpha_max;
    r.alpha_pre = b.alpha_pre;
    r.gamma_bar = b.gamma_bar;
    r.gamma_min = b.gamma_min;
    r.gamma_max = b.gamma_max;
    r.lambda_min = b.lambda_min;
    return out;
  }

 private:
  SolverConfig config_;
  Bounds bounds_;
  ProblemConstants constants_;
};

namespace detail {

inline double relative_excess(double lhs, double rhs) {
  return (lhs - rhs) / std::max(1.0, std::abs(rhs));
}

/// Checks the per-iteration guarantees of the step rule; returns violations.
inline std::vector<AuditViolation> audit_step(const SipmStepper& stepper,
                                              const SolverState& before,
                                              const StepOutcome& out,
                                              const Objective& objective, double chi,
                                              double phi_before) {
  std::vector<AuditViolation> v;
  const auto fail = [&](const char* what, double lhs, double rhs) {
    v.push_back({before.k, what, lhs, rhs});
  };
  const Bounds& bounds = stepper.bounds();
  const SolverConfig& cfg = stepper.config();
  const ProblemConstants& c = stepper.constants();
  const IterationRecord& r = out.record;
  const StepSizeBundle& b = out.bundle;
  constexpr double rel = 1e-12;

  if (!in_neighborhood(out.next.x, bounds, r.theta_k)) {
    fail("x_{k+1} in N(theta_k)", min_slack(out.next.x, bounds), r.theta_k);
  }

  const double ell_local = local_lipschitz(r.mu_k, before.x, out.next.x, bounds, c.ell_f);
  if (ell_local > r.ell_k * (1 + rel)) fail("ell(x_k, x_{k+1}) <= ell_k", ell_local, r.ell_k);
  const double ceiling = c.ell_f + 2.0 * r.mu_k / (r.theta_k * r.theta_k);
  if (r.ell_k > ceiling * (1 + rel)) fail("ell_k <= ell_f + 2 mu theta^-2", r.ell_k, ceiling);

  if (r.alpha_k < b.alpha_min * (1 - rel)) fail("alpha_k >= alpha_min", r.alpha_k, b.alpha_min);
  if (r.alpha_k > b.alpha_max * (1 + rel)) fail("alpha_k <= alpha_max", r.alpha_k, b.alpha_max);
  if (r.gamma_k < b.gamma_min * (1 - rel) - 1e-15) {
    fail("gamma_k >= gamma_min", r.gamma_k, b.gamma_min);
  }
  if (r.gamma_k > b.gamma_max) fail("gamma_k <= gamma_max", r.gamma_k, b.gamma_max);
  if (r.gamma_k * r.alpha_k > b.gamma_bar * b.alpha_pre * (1 + rel)) {
    fail("gamma_k alpha_k <= gamma_bar alpha_pre", r.gamma_k * r.alpha_k,
         b.gamma_bar * b.alpha_pre);
  }

  double qd = 0.0;
  double q_hinv_q = 0.0;
  for (std::size_t i = 0; i < out.q.size(); ++i) {
    qd += out.q[i] * b.direction[i];
    q_hinv_q += out.q[i] * out.q[i] / out.h[i];
  }
  if (r.q_norm > 0 && !(qd < 0)) fail("q_k^T d_k < 0", qd, 0.0);

  if (cfg.mode == Setting::deterministic) {
    const std::size_t next_k = before.k + 1;
    double mu_next = r.mu_k;
    const auto* stair = std::get_if<StaircaseSchedule>(&cfg.schedule);
    if (!stair || next_k <= stair->maxiter) mu_next = mu_at(cfg.schedule, next_k);
    const double phi_after = shifted_barrier_value(objective.value(out.next.x), out.next.x,
                                                   bounds, mu_next, chi);
    const double lhs = phi_after - phi_before;
    const double rhs = -0.5 * r.gamma_k * r.alpha_k * q_hinv_q +
                       1e-10 * (1.0 + std::abs(phi_before));
    if (lhs > rhs) fail("shifted barrier decrease", lhs, rhs);
  }
  return v;
}

}  // namespace detail

/// Runs maxiter iterations from x1. Final metrics use the true gradient.
inline RunResult run_sipm(const Objective& objective, const Bounds& bounds,
                          const SolverConfig& config, std::span<const double> x1) {
  check_dimension(bounds, x1, "x1");
  if (objective.dimension() != bounds.size()) {
    throw Error(Errc::dimension_mismatch, "objective and bounds differ in dimension");
  }
  if (config.mode == Setting::stochastic && config.constants.sigma_inf < 0) {
    throw Error(Errc::invalid_argument, "sigma_inf must be nonnegative");
  }
  if (config.param_mode == ParamMode::theory &&
      std::holds_alternative<PowerSchedule>(config.schedule)) {
    const auto violations =
        validate_exponents(std::get<PowerSchedule>(config.schedule).exponents, config.mode);
    if (!violations.empty()) {
      std::string msg = "exponents rejected:";
      for (const auto& s : violations) msg += " " + s + ";";
      throw Error(Errc::invalid_argument, msg);
    }
  }

  SipmStepper stepper(config, bounds);
  const double theta0 = schedule_theta0(config.schedule);
  if (!(theta0 < 0.5 * stepper.constants().delta)) {
    throw Error(Errc::theta_too_large, "theta0 must be below Delta/2");
  }
  if (!in_neighborhood(x1, bounds, theta0) || !strictly_interior(x1, bounds)) {
    throw Error(Errc::infeasible_start, "x1 is not in N(theta0)");
  }

  const double chi = config.chi > 0 ? config.chi : default_chi(bounds);
  const bool auditing = config.audit != AuditLevel::off;
  const bool keep_records = config.keep_records || config.audit == AuditLevel::full_trace;

  std::optional<BatchSampler> sampler;
  if (config.mode == Setting::stochastic && objective.sample_count() > 0) {
    sampler.emplace(objective.sample_count(),
                    batch_size_for(objective.sample_count(), config.batch_fraction),
                    config.seed);
  }

  RunResult result;
  SolverState state{Vector(x1.begin(), x1.end()), 1};
  double mu_last = schedule_mu1(config.schedule);
  for (std::size_t it = 0; it < config.maxiter; ++it) {
    Vector g;
    if (sampler) {
      const auto batch = sampler->next();
      g = objective.stochastic_gradient(state.x, batch);
    } else {
      g = objective.gradient(state.x);
    }
    StepOutcome out = stepper.step(state, g);
    mu_last = out.record.mu_k;
    if (it == 0) result.first_alpha = out.record.alpha_k;
    result.last_alpha = out.record.alpha_k;
    if (out.record.stalled) ++result.stall_count;

    if (auditing) {
      const double phi_before = shifted_barrier_value(objective.value(state.x), state.x,
                                                      bounds, out.record.mu_k, chi);
      out.record.phi_tilde = phi_before;
      auto violations = detail::audit_step(stepper, state, out, objective, chi, phi_before);
      ++result.audited_iterations;
      if (!violations.empty() && config.strict_audit) {
        const AuditViolation& f = violations.front();
        throw Error(Errc::invariant_violation,
                    "k = " + std::to_string(f.k) + ": " + f.check + " (" +
                        std::to_string(f.lhs) + " vs " + std::to_string(f.rhs) + ")");
      }
      result.violations.insert(result.violations.end(), violations.begin(), violations.end());
    }
    if (keep_records) result.records.push_back(out.record);
    state = std::move(out.next);
    ++result.iterations;
  }

  result.final_x = state.x;
  const Vector g = objective.gradient(result.final_x);
  result.final_objective = objective.value(result.final_x);
  result.final_projected_grad_norm = projected_gradient_norm(result.final_x, g, bounds);
  result.final_kkt = kkt_certificate(result.final_x, g, bounds, mu_last);
  return result;
}

}  // namespace sipm
