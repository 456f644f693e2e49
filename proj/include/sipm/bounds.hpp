#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sipm/error.hpp"

namespace sipm {

using Vector = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Box [l, u] with extended-real entries. Infinite sides are stored as +-inf
/// and excluded from the finite index sets L and U.
class Bounds {
 public:
  Bounds() = default;

  Bounds(Vector lower, Vector upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) {
      throw Error(Errc::dimension_mismatch, "lower and upper differ in length");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      const double l = lower_[i];
      const double u = upper_[i];
      if (std::isnan(l) || std::isnan(u) || l == kInf || u == -kInf) {
        throw Error(Errc::invalid_bounds,
                    "coordinate " + std::to_string(i) + " has an invalid side");
      }
      if (!(l < u)) {
        throw Error(Errc::invalid_bounds,
                    "lower >= upper at coordinate " + std::to_string(i));
      }
      if (std::isfinite(l)) lower_idx_.push_back(i);
      if (std::isfinite(u)) upper_idx_.push_back(i);
    }
    if (!lower_.empty() && lower_idx_.empty() && upper_idx_.empty()) {
      throw Error(Errc::invalid_bounds, "at least one side must be finite");
    }
  }

  static Bounds uniform(std::size_t n, double lo, double hi) {
    return Bounds(Vector(n, lo), Vector(n, hi));
  }

  std::size_t size() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  bool has_lower(std::size_t i) const { return std::isfinite(lower_[i]); }
  bool has_upper(std::size_t i) const { return std::isfinite(upper_[i]); }

  /// L = {i : l_i > -inf}
  const std::vector<std::size_t>& lower_indices() const noexcept {
    return lower_idx_;
  }
  /// U = {i : u_i < inf}
  const std::vector<std::size_t>& upper_indices() const noexcept {
    return upper_idx_;
  }
  std::size_t finite_side_count() const noexcept {
    return lower_idx_.size() + upper_idx_.size();
  }

 private:
  Vector lower_;
  Vector upper_;
  std::vector<std::size_t> lower_idx_;
  std::vector<std::size_t> upper_idx_;
};

inline void check_dimension(const Bounds& bounds, std::span<const double> x,
                            const char* what = "x") {
  if (x.size() != bounds.size()) {
    throw Error(Errc::dimension_mismatch,
                std::string(what) + " has length " + std::to_string(x.size()) +
                    ", bounds have " + std::to_string(bounds.size()));
  }
}

/// Delta = min{cap, min_i (u_i - l_i)}, with inf - a = inf.
inline double range_gap(const Bounds& bounds, double cap) {
  if (!(cap > 0)) throw Error(Errc::invalid_argument, "cap must be positive");
  double gap = cap;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    gap = std::min(gap, bounds.upper(i) - bounds.lower(i));
  }
  return gap;
}

/// Membership in N(theta) = {x : l + theta <= x <= u - theta}.
inline bool in_neighborhood(std::span<const double> x, const Bounds& bounds,
                            double theta) {
  check_dimension(bounds, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (bounds.has_lower(i) && x[i] < bounds.lower(i) + theta) return false;
    if (bounds.has_upper(i) && x[i] > bounds.upper(i) - theta) return false;
  }
  return true;
}

/// Componentwise clamp onto N(theta).
inline Vector project_to_neighborhood(std::span<const double> x,
                                      const Bounds& bounds, double theta) {
  check_dimension(bounds, x);
  if (theta < 0) throw Error(Errc::invalid_argument, "theta must be >= 0");
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double lo = bounds.lower(i) + theta;
    const double hi = bounds.upper(i) - theta;
    if (lo > hi || (theta > 0 && bounds.has_lower(i) && bounds.has_upper(i) &&
                    !(2 * theta < bounds.upper(i) - bounds.lower(i)))) {
      throw Error(Errc::empty_neighborhood,
                  "theta too large at coordinate " + std::to_string(i));
    }
    out[i] = std::clamp(out[i], lo, hi);
  }
  return out;
}

/// Distance from x to its finite bounds; min over both sides (inf if none).
inline double min_slack(std::span<const double> x, const Bounds& bounds) {
  check_dimension(bounds, x);
  double s = kInf;
  for (std::size_t i : bounds.lower_indices()) s = std::min(s, x[i] - bounds.lower(i));
  for (std::size_t i : bounds.upper_indices()) s = std::min(s, bounds.upper(i) - x[i]);
  return s;
}

inline bool strictly_interior(std::span<const double> x, const Bounds& bounds) {
  return min_slack(x, bounds) > 0;
}

inline void require_interior(std::span<const double> x, const Bounds& bounds,
                             const char* who) {
  if (!strictly_interior(x, bounds)) {
    throw Error(Errc::not_interior,
                std::string(who) + ": point is not strictly interior");
  }
}

}  // namespace sipm
