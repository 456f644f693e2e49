#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "sipm/bounds.hpp"

namespace sipm {

enum class Setting { deterministic, stochastic };

/// Power-law decay rates of the barrier, neighborhood, and step-size
/// sequences: mu_k ~ k^t_mu, theta_{k-1} ~ k^t_theta, alpha_k ~ k^t_alpha.
struct ExponentTriple {
  double t_mu = -1.0;
  double t_theta = -1.0;
  double t_alpha = 0.0;
};

/// Returns every violated admissibility constraint (empty means admissible).
/// Closed constraints are relaxed and open constraints tightened by 1e-12 so
/// that boundary lines classify the same way regardless of rounding.
inline std::vector<std::string> validate_exponents(const ExponentTriple& t,
                                                   Setting setting) {
  constexpr double eps = 1e-12;
  std::vector<std::string> v;
  const double sum = t.t_mu + t.t_alpha;
  if (std::abs(t.t_mu - t.t_theta) > eps) v.emplace_back("t_mu must equal t_theta");
  if (setting == Setting::deterministic) {
    if (!(t.t_mu < -eps)) v.emplace_back("t_mu must be negative");
    if (!(t.t_alpha <= eps)) v.emplace_back("t_alpha must be <= 0");
    if (!(sum >= -1.0 - eps)) v.emplace_back("t_mu + t_alpha must be >= -1");
    if (!(sum < -eps)) v.emplace_back("t_mu + t_alpha must be < 0");
  } else {
    if (!(t.t_mu > -1.0 + eps)) v.emplace_back("t_mu must be > -1");
    if (!(t.t_mu < -0.5 - eps)) v.emplace_back("t_mu must be < -1/2");
    if (!(t.t_alpha < -eps)) v.emplace_back("t_alpha must be negative");
    if (!(sum >= -1.0 - eps)) v.emplace_back("t_mu + t_alpha must be >= -1");
    if (!(sum < -eps)) v.emplace_back("t_mu + t_alpha must be < 0");
    if (!(t.t_mu + 2.0 * t.t_alpha < -1.0 - eps)) {
      v.emplace_back("t_mu + 2 t_alpha must be < -1");
    }
  }
  return v;
}

/// mu_k = mu1 k^t_mu and theta_{k-1} = theta0 k^t_theta.
struct PowerSchedule {
  double mu1 = 1.0;
  double theta0 = 0.1;
  ExponentTriple exponents;
};

/// mu_k = mu1 s_k, theta_k = theta0 s_k for k in [1, maxiter], where s is
/// equal-length runs of {1, 1e-1, ..., 1e-nu, 1e-8/mu1}.
struct StaircaseSchedule {
  double mu1 = 1.0;
  double theta0 = 0.1;
  std::size_t maxiter = 0;
  Vector levels;
  std::size_t repetition_length = 0;
  // mu1 == 1e-8 exactly: no power of ten exceeds 1e-8/mu1, the schedule is
  // constant.
  bool degenerate = false;

  double level_at(std::size_t k) const {
    if (k == 0) return 1.0;
    if (k > maxiter) {
      throw Error(Errc::horizon_exceeded,
                  "k = " + std::to_string(k) + " exceeds maxiter = " +
                      std::to_string(maxiter));
    }
    if (repetition_length == 0) return levels.back();
    return levels[std::min((k - 1) / repetition_length, levels.size() - 1)];
  }
};

inline constexpr double kFinalBarrier = 1e-8;

inline StaircaseSchedule build_staircase(double mu1, std::size_t maxiter,
                                         double theta0) {
  if (!(mu1 >= kFinalBarrier)) {
    throw Error(Errc::invalid_mu1, "mu1 must be at least 1e-8");
  }
  const double last = kFinalBarrier / mu1;
  // nu = largest integer with 10^-nu > last (relative slack absorbs the
  // rounding of the quotient).
  const auto exceeds = [last](int nu) {
    return std::pow(10.0, -nu) > last * (1.0 + 1e-9);
  };
  int nu = static_cast<int>(std::floor(std::log10(1.0 / last))) + 1;
  while (nu >= 0 && !exceeds(nu)) --nu;
  while (exceeds(nu + 1)) ++nu;

  StaircaseSchedule s;
  s.mu1 = mu1;
  s.theta0 = theta0;
  s.maxiter = maxiter;
  s.degenerate = nu < 0;
  for (int j = 0; j <= std::max(nu, 0); ++j) s.levels.push_back(std::pow(10.0, -j));
  s.levels.push_back(last);
  s.repetition_length = maxiter / s.levels.size();
  return s;
}

using Schedule = std::variant<PowerSchedule, StaircaseSchedule>;

inline double mu_at(const Schedule& schedule, std::size_t k) {
  if (k == 0) throw Error(Errc::invalid_argument, "mu is indexed from k = 1");
  return std::visit(
      [k](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerSchedule>) {
          return s.mu1 * std::pow(static_cast<double>(k), s.exponents.t_mu);
        } else {
          return s.mu1 * s.level_at(k);
        }
      },
      schedule);
}

/// theta_k. For power schedules the indexing is shifted: theta_k =
/// theta0 (k+1)^t_theta, so theta_at(s, 0) is theta0.
inline double theta_at(const Schedule& schedule, std::size_t k) {
  return std::visit(
      [k](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerSchedule>) {
          return s.theta0 * std::pow(static_cast<double>(k + 1), s.exponents.t_theta);
        } else {
          return s.theta0 * s.level_at(k);
        }
      },
      schedule);
}

inline double schedule_mu1(const Schedule& schedule) {
  return std::visit([](const auto& s) { return s.mu1; }, schedule);
}
inline double schedule_theta0(const Schedule& schedule) {
  return std::visit([](const auto& s) { return s.theta0; }, schedule);
}

enum class ParamMode { theory, practical };

/// Allowances above alpha_{k,min} and gamma_{k,min}.
struct BufferSequences {
  ParamMode mode = ParamMode::practical;
  // theory mode: alpha_buff k^{2 t_mu}, gamma_buff k^{t_mu}; +inf means no
  // cap (alpha_max = inf, gamma_max = 1).
  double alpha_buff_base = 1.0;
  double gamma_buff_base = 1.0;
  double t_mu = -1.0;
  // practical mode: (maxiter/k)^1.1 and (maxiter/k)^0.55
  std::size_t maxiter = 1;

  double alpha_buff(std::size_t k) const {
    const double kk = static_cast<double>(k);
    if (mode == ParamMode::practical) {
      return std::pow(static_cast<double>(maxiter) / kk, 1.1);
    }
    if (std::isinf(alpha_buff_base)) return kInf;
    return alpha_buff_base * std::pow(kk, 2.0 * t_mu);
  }

  double gamma_buff(std::size_t k) const {
    const double kk = static_cast<double>(k);
    if (mode == ParamMode::practical) {
      return std::pow(static_cast<double>(maxiter) / kk, 0.55);
    }
    if (std::isinf(gamma_buff_base)) return kInf;
    return gamma_buff_base * std::pow(kk, t_mu);
  }
};

/// mu1 = max{1e-5, min{1e-3 ||g1||_2 / ||D||, 1}},
/// D = diag(u - x1)^-1 - diag(x1 - l)^-1 and ||D|| = max_i |D_ii|.
inline double mu1_init(std::span<const double> g1, std::span<const double> x1,
                       const Bounds& bounds) {
  check_dimension(bounds, g1, "g1");
  require_interior(x1, bounds, "mu1_init");
  double dnorm = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    double d = 0.0;
    if (bounds.has_upper(i)) d += 1.0 / (bounds.upper(i) - x1[i]);
    if (bounds.has_lower(i)) d -= 1.0 / (x1[i] - bounds.lower(i));
    dnorm = std::max(dnorm, std::abs(d));
  }
  double gnorm = 0.0;
  for (double v : g1) gnorm += v * v;
  gnorm = std::sqrt(gnorm);
  double ratio = 0.0;
  if (gnorm > 0.0) ratio = dnorm > 0.0 ? 1e-3 * gnorm / dnorm : kInf;
  return std::max(1e-5, std::min(ratio, 1.0));
}

/// theta0 = min{slacks of x1, 1 / (2/Delta + (kappa + sigma)/mu1)}.
inline double theta0_init(std::span<const double> x1, const Bounds& bounds,
                          double kappa_inf, double sigma_inf, double mu1,
                          double delta) {
  require_interior(x1, bounds, "theta0_init");
  const double theta_bar = 1.0 / (2.0 / delta + (kappa_inf + sigma_inf) / mu1);
  return std::min(min_slack(x1, bounds), theta_bar);
}

/// Strict lower threshold on mu1 under which the gamma lower bound stays
/// positive: (theta0 (kappa + sigma) Delta / 2) / (Delta/2 - theta0).
inline double min_mu1_threshold(double theta0, double kappa_inf,
                                double sigma_inf, double delta) {
  if (!(theta0 < 0.5 * delta)) {
    throw Error(Errc::invalid_theta0, "theta0 must be below Delta/2");
  }
  return 0.5 * theta0 * (kappa_inf + sigma_inf) * delta / (0.5 * delta - theta0);
}

}  // namespace sipm
