#pragma once

#include <complex>

#include "yblab/errors.hpp"

namespace yblab {

using Complex = std::complex<double>;

/// Accuracy targets and work limits shared by every numerical routine.
///
/// `max_terms` bounds series and product lengths; `max_refinements` bounds
/// adaptive subdivisions and cutoff doublings.
struct PrecisionBudget {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int max_terms = 20000;
  int max_refinements = 4000;

  void validate() const {
    if (!(rel_tol > 0.0)) throw ConfigError("PrecisionBudget: rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw ConfigError("PrecisionBudget: abs_tol must be >= 0");
    if (max_terms < 1) throw ConfigError("PrecisionBudget: max_terms must be >= 1");
    if (max_refinements < 1) throw ConfigError("PrecisionBudget: max_refinements must be >= 1");
  }
};

inline void require_finite(Complex z, const char* where) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw NaNError(std::string(where) + ": non-finite argument");
}

}  // namespace yblab
