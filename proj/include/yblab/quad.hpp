#pragma once

#include <cstdint>
#include <functional>

#include "yblab/budget.hpp"

namespace yblab::quad {

struct Interval {
  double lo;
  double hi;
};

struct QuadResult {
  Complex value{};
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
  /// Final half-width T for line integrals, final shell N for sums; 0 otherwise.
  double truncation_used = 0.0;
};

/// Cutoff growth schedule for integrals over the real line and bilateral sums.
struct TailPolicy {
  double initial_cutoff = 8.0;
  double growth_factor = 2.0;
  double stop_rel = 1e-12;
  int max_growth = 48;

  void validate() const;
};

using Integrand = std::function<Complex(double)>;
using Term = std::function<Complex(std::int64_t)>;

/// Adaptive Gauss-Kronrod (7/15) quadrature with global subdivision.
/// Throws BudgetExhausted once more than `max_refinements` subintervals are
/// needed.
QuadResult integrate_finite(const Integrand& f, Interval iv, const PrecisionBudget& budget);

/// Integral over the real line: [-T, T] with T grown geometrically until the
/// added shell contributes less than `stop_rel` of the running value.
QuadResult integrate_line(const Integrand& f, const TailPolicy& tail, const PrecisionBudget& budget);

/// Sum over n in Z. Shells |n| = N are added until a growth step contributes
/// less than `stop_rel` and the fitted power-law tail C N^(1-s) does too; the
/// fitted tail is added to the error estimate, never to the value.
QuadResult sum_bilateral(const Term& term, const TailPolicy& tail, const PrecisionBudget& budget);

/// Fitted remaining tail sum_{|n| > N} from the last two shell magnitudes,
/// assuming |shell(n)| ~ C n^-s. Returns +inf when the shells do not decay.
double power_law_tail(double shell_prev, double shell_last, double n_last);

}  // namespace yblab::quad
