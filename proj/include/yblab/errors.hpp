#pragma once

#include <stdexcept>
#include <string>

namespace yblab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Special functions.
class PoleError : public Error { using Error::Error; };
class NomeDomainError : public Error { using Error::Error; };
class StripError : public Error { using Error::Error; };
class ContourError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class NaNError : public Error { using Error::Error; };

/// A series or iteration ran out of budget before meeting its tolerance.
class ConvergenceError : public Error { using Error::Error; };

// Quadrature.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, double best_value, double estimate)
      : Error(what), best_value_(best_value), error_estimate_(estimate) {}
  double best_value() const noexcept { return best_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_value_;
  double error_estimate_;
};
class TailNotDecaying : public Error { using Error::Error; };

// Weights.
class KindMismatch : public Error { using Error::Error; };
class RealityViolation : public Error { using Error::Error; };

// Lattice.
class TooManyInternalSites : public Error { using Error::Error; };

// Configuration (CLI, JSON configs).
class ConfigError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace yblab
