#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sipm {

enum class Errc {
  invalid_argument,
  invalid_bounds,
  dimension_mismatch,
  not_interior,
  empty_neighborhood,
  horizon_exceeded,
  invalid_mu1,
  invalid_theta0,
  not_in_prior_neighborhood,
  eigenvalue_bound_violation,
  infeasible_start,
  theta_too_large,
  invariant_violation,
  theta_link_violation,
  domain_error,
  batch_too_large,
  malformed_line,
  non_increasing_index,
  not_binary,
  label_mismatch,
  io_error,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_bounds: return "InvalidBounds";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_interior: return "NotInterior";
    case Errc::empty_neighborhood: return "EmptyNeighborhood";
    case Errc::horizon_exceeded: return "HorizonExceeded";
    case Errc::invalid_mu1: return "InvalidMu1";
    case Errc::invalid_theta0: return "InvalidTheta0";
    case Errc::not_in_prior_neighborhood: return "NotInPriorNeighborhood";
    case Errc::eigenvalue_bound_violation: return "EigenvalueBoundViolation";
    case Errc::infeasible_start: return "InfeasibleStart";
    case Errc::theta_too_large: return "ThetaTooLarge";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::theta_link_violation: return "ThetaLinkViolation";
    case Errc::domain_error: return "DomainError";
    case Errc::batch_too_large: return "BatchTooLarge";
    case Errc::malformed_line: return "MalformedLine";
    case Errc::non_increasing_index: return "NonIncreasingIndex";
    case Errc::not_binary: return "NotBinary";
    case Errc::label_mismatch: return "LabelMismatch";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library. Parser errors carry a 1-based line.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
};

}  // namespace sipm
