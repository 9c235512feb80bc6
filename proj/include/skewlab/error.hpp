#pragma once

#include <stdexcept>
#include <string>

namespace skewlab {

enum class ErrorKind {
  InvalidPotential,
  StripViolation,
  Numeric,
  Argument,
  PreconditionViolated,
  ResolventSingular,
  FitUndefined,
  OutOfRange,
  ParametrizationFailed,
  IncompleteRecord,
  CoverageVacuous,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when the resolvent of a finite-volume operator is numerically
/// singular at the requested energy. Carries an estimate of dist(E, spectrum).
class ResolventSingularError : public Error {
 public:
  ResolventSingularError(const std::string& message, double distance_estimate)
      : Error(ErrorKind::ResolventSingular, message),
        distance_estimate_(distance_estimate) {}

  double distance_estimate() const noexcept { return distance_estimate_; }

 private:
  double distance_estimate_;
};

/// Raised by the complexified growth bound when lambda * epsilon <= 1.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& message, double failing_x)
      : Error(ErrorKind::PreconditionViolated, message), failing_x_(failing_x) {}

  double failing_x() const noexcept { return failing_x_; }

 private:
  double failing_x_;
};

}  // namespace skewlab
