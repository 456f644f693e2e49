#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "sipm/bounds.hpp"

namespace sipm {

/// phi(x, mu) = f - mu * sum_L log(x_i - l_i) - mu * sum_U log(u_i - x_i).
inline double barrier_value(double f_value, std::span<const double> x,
                            const Bounds& bounds, double mu) {
  require_interior(x, bounds, "barrier_value");
  double logs = 0.0;
  for (std::size_t i : bounds.lower_indices()) logs += std::log(x[i] - bounds.lower(i));
  for (std::size_t i : bounds.upper_indices()) logs += std::log(bounds.upper(i) - x[i]);
  return f_value - mu * logs;
}

/// The chi-scaled barrier: phi + mu * log(chi) * (|L| + |U|). Same gradient
/// as phi; bounded below when every slack is at most chi.
inline double shifted_barrier_value(double f_value, std::span<const double> x,
                                    const Bounds& bounds, double mu,
                                    double chi) {
  if (!(chi > 1)) throw Error(Errc::invalid_argument, "chi must exceed 1");
  return barrier_value(f_value, x, bounds, mu) +
         mu * std::log(chi) * static_cast<double>(bounds.finite_side_count());
}

/// Default chi for diagnostics: largest doubly-finite range plus one.
inline double default_chi(const Bounds& bounds) {
  double widest = 0.0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (bounds.has_lower(i) && bounds.has_upper(i)) {
      widest = std::max(widest, bounds.upper(i) - bounds.lower(i));
    }
  }
  return std::max(widest + 1.0, 1.0 + 1e-6);
}

/// q = g - mu (x - l)^-1 + mu (u - x)^-1, infinite sides contributing zero.
inline Vector barrier_gradient(std::span<const double> g,
                               std::span<const double> x, const Bounds& bounds,
                               double mu) {
  check_dimension(bounds, g, "g");
  require_interior(x, bounds, "barrier_gradient");
  Vector q(g.begin(), g.end());
  for (std::size_t i : bounds.lower_indices()) q[i] -= mu / (x[i] - bounds.lower(i));
  for (std::size_t i : bounds.upper_indices()) q[i] += mu / (bounds.upper(i) - x[i]);
  return q;
}

/// ||proj_[l,u](x - g) - x||_inf
inline double projected_gradient_norm(std::span<const double> x,
                                      std::span<const double> g,
                                      const Bounds& bounds) {
  check_dimension(bounds, x);
  check_dimension(bounds, g, "g");
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x[i] - g[i], bounds.lower(i), bounds.upper(i));
    norm = std::max(norm, std::abs(p - x[i]));
  }
  return norm;
}

struct KktCertificate {
  Vector y;
  Vector z;
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
};

/// Barrier multipliers y = mu/(x - l), z = mu/(u - x). Complementarity equals
/// mu by construction and is reported as such.
inline KktCertificate kkt_certificate(std::span<const double> x,
                                      std::span<const double> g,
                                      const Bounds& bounds, double mu) {
  check_dimension(bounds, g, "g");
  require_interior(x, bounds, "kkt_certificate");
  KktCertificate cert;
  cert.y.assign(x.size(), 0.0);
  cert.z.assign(x.size(), 0.0);
  for (std::size_t i : bounds.lower_indices()) cert.y[i] = mu / (x[i] - bounds.lower(i));
  for (std::size_t i : bounds.upper_indices()) cert.z[i] = mu / (bounds.upper(i) - x[i]);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r = std::max(r, std::abs(g[i] - cert.y[i] + cert.z[i]));
  }
  cert.stationarity_residual = r;
  cert.complementarity_residual = bounds.finite_side_count() > 0 ? mu : 0.0;
  return cert;
}

}  // namespace sipm
