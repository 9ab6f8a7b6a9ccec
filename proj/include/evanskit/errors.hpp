#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evanskit {

enum class ErrorKind {
  invalid_argument,
  degenerate_viscosity,
  characteristic_shock,
  noninvertible_a11,
  no_connection,
  domain_too_short,
  h1_violation,
  scaling_undefined,
  splitting_failure,
  discontinuity,
  accuracy,
  angle_required,
  resolution,
  zero_on_contour,
  glancing,
  fit_error,
  unknown_system,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the toolkit carries a machine-readable kind so the
/// CLI can emit a structured error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace evanskit
