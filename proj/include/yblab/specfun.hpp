#pragma once

#include "yblab/budget.hpp"

namespace yblab::specfun {

/// Principal branch of log Gamma(z), analytic off (-inf, 0].
/// On the negative real axis the value is the limit from above.
Complex log_gamma(Complex z);

/// log[Gamma(a + c) Gamma(a - c)]; exactly even in c.
Complex gamma_pm_log(Complex a, Complex c);

/// Jacobi theta_1(z | q) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) z), with
/// q^{(n+1/2)^2} taken on the principal branch of log q.
Complex theta1(Complex z, Complex q);

/// Nomes of the elliptic master solution: p = e^{i pi sigma}, q = e^{i pi tau},
/// eta = -i pi (tau + sigma) / 2. `eta` holds Re of that crossing parameter,
/// which equals -log(pq)/2 for real nomes.
struct EllipticNomes {
  Complex p;
  Complex q;
  Complex tau;
  Complex sigma;
  double eta;

  static EllipticNomes from_nomes(Complex p, Complex q);
  static EllipticNomes real(double p, double q);
  bool is_real() const { return p.imag() == 0.0 && q.imag() == 0.0; }
};

enum class EllipticGammaPath { Auto, Product, Sum };

/// Elliptic gamma function Phi(z). The sum path exponentiates the Fourier
/// form and is restricted to the strip |Im z| < eta (StripError otherwise).
Complex elliptic_gamma(Complex z, const EllipticNomes& nomes,
                       EllipticGammaPath path = EllipticGammaPath::Auto,
                       const PrecisionBudget& budget = {});

/// A logarithm of Phi(z). The sum path returns the exponent of the Fourier
/// form; the product path returns the sum of principal logs of the factors.
/// The two agree modulo 2 pi i.
Complex log_elliptic_gamma(Complex z, const EllipticNomes& nomes,
                           EllipticGammaPath path = EllipticGammaPath::Auto,
                           const PrecisionBudget& budget = {});

/// Phi with the single factor (j, k) = (0, 0) of the denominator (`drop_den`)
/// or numerator removed. Used for residues at the poles/zeros closest to the
/// real axis.
Complex elliptic_gamma_reduced(Complex z, const EllipticNomes& nomes, bool drop_den);

/// Normalisation kappa(alpha) of the elliptic weights.
/// |alpha| < eta uses the bilateral Fourier sum; beyond that the analytic
/// continuation through a triple product is used (needed by the second
/// inversion relation). Real nomes only.
double log_kappa_elliptic(double alpha, const EllipticNomes& nomes, const PrecisionBudget& budget = {});
/// kappa(alpha) for 0 <= |alpha| < eta; DomainError outside.
double kappa_elliptic(double alpha, const EllipticNomes& nomes, const PrecisionBudget& budget = {});
/// Signed kappa(alpha) on the analytic continuation, valid for any alpha
/// away from its poles and zeros.
double kappa_elliptic_continued(double alpha, const EllipticNomes& nomes);

enum class Regime { RealPositive, UnitCircle };

/// Modular parameter b of the hyperbolic model; eta = (b + 1/b) / 2.
struct ModularParam {
  Complex b;
  Regime regime;
  Complex eta;

  static ModularParam real(double b);
  /// b = e^{i theta}, 0 < theta < pi/2.
  static ModularParam unit_circle(double theta);
  static ModularParam from_b(Complex b);
};

enum class NcqdlPath { Auto, Integral, Product };

/// Non-compact quantum dilogarithm phi(z). The integral path evaluates the
/// defining integral on the shifted line Im y = pi/2 * min(Re b, Re 1/b); the
/// product path uses the q-Pochhammer factorisation and requires Im b^2 > 0.
Complex ncqdl(Complex z, const ModularParam& b, const PrecisionBudget& budget = {},
              NcqdlPath path = NcqdlPath::Auto);
/// A logarithm of phi(z) (exponent of the integral, or sum of product logs).
Complex log_ncqdl(Complex z, const ModularParam& b, const PrecisionBudget& budget = {},
                  NcqdlPath path = NcqdlPath::Auto);

/// Normalisation kappa(alpha) of the hyperbolic weights, from the contour
/// integral plus the explicit quadratic phase terms. Requires |Re alpha| < Re eta.
Complex log_kappa_hyperbolic(Complex alpha, const ModularParam& b, const PrecisionBudget& budget = {});
Complex kappa_hyperbolic(Complex alpha, const ModularParam& b, const PrecisionBudget& budget = {});

}  // namespace yblab::specfun
