#include "yblab/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "yblab/quad.hpp"

namespace yblab::specfun {

namespace {

using std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
constexpr double kSeriesEps = 2e-17;

// exp(w) - 1 without cancellation for small |w|.
Complex cexpm1(Complex w) {
  if (std::abs(w) < 0.5) {
    const Complex h = 0.5 * w;
    return 2.0 * std::sinh(h) * std::exp(h);
  }
  return std::exp(w) - 1.0;
}

// log(1 + w), accurate for small |w|.
Complex clog1p(Complex w) {
  const double a = std::abs(w);
  if (a < 1e-4) {
    return w * (1.0 - w * (0.5 - w * (1.0 / 3.0 - 0.25 * w)));
  }
  if (a < 0.5) {
    // log(1+w) = 2 atanh(w / (2 + w)).
    return 2.0 * std::atanh(w / (2.0 + w));
  }
  return std::log(1.0 + w);
}

// Stirling series for log Gamma, valid for Re z >= 0 and |z| >= 12.
Complex stirling(Complex z) {
  // B_{2k} / (2k (2k-1)), k = 1..8.
  static constexpr std::array<double, 8> c = {
      1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,         -1.0 / 1680.0,
      1.0 / 1188.0,        -691.0 / 360360.0,     1.0 / 156.0,          -3617.0 / 122400.0};
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex series = c[7];
  for (int k = 6; k >= 0; --k) series = series * inv2 + c[k];
  series *= inv;
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + series;
}

// 1 - x^{2n} for a real nome x in (0,1).
double one_minus_pow(double log_x, int n) { return -std::expm1(2.0 * n * log_x); }

}  // namespace

Complex log_gamma(Complex z) {
  require_finite(z, "log_gamma");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw PoleError("log_gamma: pole at z = " + std::to_string(z.real()));
  Complex shift{};
  while (z.real() < 0.0 || std::abs(z) < 12.0) {
    shift += std::log(z);
    z += 1.0;
  }
  return stirling(z) - shift;
}

Complex gamma_pm_log(Complex a, Complex c) {
  const Complex lp = log_gamma(a + c);
  const Complex lm = log_gamma(a - c);
  return lp + lm;
}

Complex theta1(Complex z, Complex q) {
  require_finite(z, "theta1");
  require_finite(q, "theta1");
  if (!(std::abs(q) < 1.0)) throw NomeDomainError("theta1: requires |q| < 1");
  if (q == Complex{}) return 0.0;
  const Complex log_q = std::log(q);
  const double im = std::abs(z.imag());
  Complex sum{};
  double scale = -1.0;
  for (int n = 0; n < 100000; ++n) {
    const double h = n + 0.5;
    const Complex qpow = std::exp(h * h * log_q);
    const Complex term = qpow * std::sin((2.0 * n + 1.0) * z);
    sum += (n % 2 == 0) ? term : -term;
    const double bound = std::abs(qpow) * std::exp((2.0 * n + 1.0) * im);
    if (scale < 0.0) scale = bound;
    if (n >= 3 && bound <= kSeriesEps * (std::abs(sum) + scale)) break;
  }
  return 2.0 * sum;
}

EllipticNomes EllipticNomes::from_nomes(Complex p, Complex q) {
  require_finite(p, "EllipticNomes");
  require_finite(q, "EllipticNomes");
  if (!(std::abs(p) < 1.0) || !(std::abs(q) < 1.0) || p == Complex{} || q == Complex{})
    throw NomeDomainError("EllipticNomes: requires 0 < |p|, |q| < 1");
  EllipticNomes n;
  n.p = p;
  n.q = q;
  n.sigma = std::log(p) / (kI * pi);
  n.tau = std::log(q) / (kI * pi);
  n.eta = (-kI * pi * 0.5 * (n.tau + n.sigma)).real();
  return n;
}

EllipticNomes EllipticNomes::real(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw NomeDomainError("EllipticNomes::real: requires 0 < p, q < 1");
  return from_nomes(p, q);
}

namespace {

Complex log_phi_sum(Complex z, const EllipticNomes& nm, const PrecisionBudget& budget) {
  if (!(std::abs(z.imag()) < nm.eta))
    throw StripError("elliptic_gamma: sum form requires |Im z| < eta");
  const Complex pq = nm.p * nm.q;
  const Complex a = pq * std::exp(-2.0 * kI * z);
  const Complex b = pq * std::exp(2.0 * kI * z);
  const double ratio = std::max(std::abs(a), std::abs(b));
  const bool real_nomes = nm.is_real();
  const double lp = real_nomes ? std::log(nm.p.real()) : 0.0;
  const double lq = real_nomes ? std::log(nm.q.real()) : 0.0;
  const Complex log_p = std::log(nm.p), log_q = std::log(nm.q);
  Complex an = 1.0, bn = 1.0, sum{};
  for (int n = 1; n <= budget.max_terms; ++n) {
    an *= a;
    bn *= b;
    Complex denom;
    if (real_nomes) {
      denom = n * one_minus_pow(lp, n) * one_minus_pow(lq, n);
    } else {
      denom = static_cast<double>(n) * (-cexpm1(2.0 * n * log_p)) * (-cexpm1(2.0 * n * log_q));
    }
    const Complex term = (an - bn) / denom;
    sum += term;
    const double tail = std::abs(term) * ratio / (1.0 - ratio);
    if (tail <= kSeriesEps * std::max(1.0, std::abs(sum))) return sum;
  }
  throw ConvergenceError("elliptic_gamma: sum form exceeded max_terms");
}

Complex log_phi_product(Complex z, const EllipticNomes& nm, const PrecisionBudget& budget,
                        int skip_num = -1, int skip_den = -1) {
  const Complex e_plus = std::exp(2.0 * kI * z);
  const Complex e_minus = std::exp(-2.0 * kI * z);
  const double grow = std::max(std::abs(e_plus), std::abs(e_minus));
  const Complex q2 = nm.q * nm.q, p2 = nm.p * nm.p;
  Complex sum{};
  Complex qj = nm.q;
  long terms = 0;
  for (int j = 0;; ++j) {
    if (std::abs(qj) * std::abs(nm.p) * grow < kSeriesEps && j > 0) break;
    Complex Q = qj * nm.p;
    for (int k = 0;; ++k) {
      if (std::abs(Q) * grow < kSeriesEps && k > 0) break;
      const bool first = (j == 0 && k == 0);
      if (!(first && skip_num == 0)) sum += clog1p(-e_plus * Q);
      if (!(first && skip_den == 0)) sum -= clog1p(-e_minus * Q);
      Q *= p2;
      if (++terms > static_cast<long>(budget.max_terms) * 50)
        throw ConvergenceError("elliptic_gamma: product form exceeded term budget");
    }
    qj *= q2;
  }
  return sum;
}

}  // namespace

Complex log_elliptic_gamma(Complex z, const EllipticNomes& nomes, EllipticGammaPath path,
                           const PrecisionBudget& budget) {
  require_finite(z, "elliptic_gamma");
  switch (path) {
    case EllipticGammaPath::Sum:
      return log_phi_sum(z, nomes, budget);
    case EllipticGammaPath::Product:
      return log_phi_product(z, nomes, budget);
    case EllipticGammaPath::Auto: {
      const double gap = nomes.eta - std::abs(z.imag());
      if (gap <= 0.0) return log_phi_product(z, nomes, budget);
      const double sum_terms = 40.0 / (2.0 * gap);
      const double prod_terms = (40.0 + 2.0 * std::abs(z.imag())) / (2.0 * -std::log(std::abs(nomes.q))) *
                                (40.0 + 2.0 * std::abs(z.imag())) / (2.0 * -std::log(std::abs(nomes.p)));
      return sum_terms <= 2.0 * prod_terms ? log_phi_sum(z, nomes, budget)
                                           : log_phi_product(z, nomes, budget);
    }
  }
  return {};
}

Complex elliptic_gamma(Complex z, const EllipticNomes& nomes, EllipticGammaPath path,
                       const PrecisionBudget& budget) {
  return std::exp(log_elliptic_gamma(z, nomes, path, budget));
}

Complex elliptic_gamma_reduced(Complex z, const EllipticNomes& nomes, bool drop_den) {
  return std::exp(log_phi_product(z, nomes, PrecisionBudget{}, drop_den ? -1 : 0, drop_den ? 0 : -1));
}

double log_kappa_elliptic(double alpha, const EllipticNomes& nm, const PrecisionBudget& budget) {
  if (!nm.is_real()) throw DomainError("kappa_elliptic: real nomes required");
  if (!std::isfinite(alpha)) throw NaNError("kappa_elliptic: non-finite alpha");
  const double eta = nm.eta;
  if (std::abs(alpha) >= eta) {
    const double k = kappa_elliptic_continued(alpha, nm);
    return std::log(std::abs(k));
  }
  const double lp = std::log(nm.p.real()), lq = std::log(nm.q.real());
  const double ratio = std::exp(-4.0 * (eta - std::abs(alpha)));
  double sum = 0.0;
  for (int n = 1; n <= budget.max_terms; ++n) {
    const double num = std::exp(-4.0 * n * (eta - alpha)) - std::exp(-4.0 * n * (eta + alpha));
    const double den = n * one_minus_pow(lp, n) * one_minus_pow(lq, n) * (1.0 + std::exp(-4.0 * eta * n));
    const double term = num / den;
    sum += term;
    if (std::abs(term) * ratio / (1.0 - ratio) <= kSeriesEps * std::max(1.0, std::abs(sum))) return sum;
  }
  throw ConvergenceError("kappa_elliptic: series exceeded max_terms");
}

double kappa_elliptic(double alpha, const EllipticNomes& nomes, const PrecisionBudget& budget) {
  if (!(std::abs(alpha) < nomes.eta))
    throw DomainError("kappa_elliptic: requires |alpha| < eta (use kappa_elliptic_continued beyond)");
  return std::exp(log_kappa_elliptic(alpha, nomes, budget));
}

double kappa_elliptic_continued(double alpha, const EllipticNomes& nm) {
  if (!nm.is_real()) throw DomainError("kappa_elliptic_continued: real nomes required");
  const double p = nm.p.real(), q = nm.q.real(), pq = p * q;
  const double ep = std::exp(4.0 * alpha), em = std::exp(-4.0 * alpha);
  const double grow = std::max(ep, em);
  double log_abs = 0.0;
  int negatives = 0;
  double pk = pq;  // (pq)^{2k+1}
  for (int k = 0; pk * q * p * grow >= kSeriesEps || k == 0; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double qj = q;
    for (int j = 0; pk * qj * p * grow >= kSeriesEps || j == 0; ++j) {
      double Q = pk * qj * p;
      for (int l = 0; Q * grow >= kSeriesEps || l == 0; ++l) {
        // log|1 - x| with sign tracking; 1 - x < 0 only for x > 1.
        auto log_factor = [&](double x) {
          if (x == 1.0) throw PoleError("kappa_elliptic_continued: zero or pole of kappa");
          if (x < 1.0) return std::log1p(-x);
          ++negatives;
          return std::log(x - 1.0);
        };
        log_abs += sign * (log_factor(em * Q) - log_factor(ep * Q));
        Q *= p * p;
      }
      qj *= q * q;
    }
    pk *= pq * pq;
  }
  return (negatives % 2 == 0 ? 1.0 : -1.0) * std::exp(log_abs);
}

ModularParam ModularParam::real(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("ModularParam::real: requires b > 0");
  return {Complex{b, 0.0}, Regime::RealPositive, Complex{0.5 * (b + 1.0 / b), 0.0}};
}

ModularParam ModularParam::unit_circle(double theta) {
  if (!(theta > 0.0 && theta < pi / 2))
    throw DomainError("ModularParam::unit_circle: requires 0 < theta < pi/2 (Im b^2 > 0)");
  const Complex b = std::polar(1.0, theta);
  // eta = (b + 1/b)/2 = cos(theta), real.
  return {b, Regime::UnitCircle, Complex{std::cos(theta), 0.0}};
}

ModularParam ModularParam::from_b(Complex b) {
  require_finite(b, "ModularParam");
  if (b.imag() == 0.0) return real(b.real());
  if (std::abs(std::abs(b) - 1.0) < 1e-14 && (b * b).imag() > 0.0)
    return unit_circle(std::arg(b));
  throw DomainError("ModularParam: b must be real positive or |b| = 1 with Im b^2 > 0");
}

namespace {

// 1 / sinh(u) = 2 s e^{-s u} / (1 - e^{-2 s u}), s = sign Re u; returned as
// (log-prefactor exponent, denominator) to combine exponents before exp.
struct SinhSplit {
  Complex exponent;  // -s u
  Complex denom;     // s (1 - e^{-2 s u}) / 2
};

SinhSplit split_sinh(Complex u) {
  const double s = u.real() >= 0.0 ? 1.0 : -1.0;
  return {-s * u, s * (-cexpm1(-2.0 * s * u)) * 0.5};
}

SinhSplit split_cosh(Complex u) {
  const double s = u.real() >= 0.0 ? 1.0 : -1.0;
  return {-s * u, (1.0 + std::exp(-2.0 * s * u)) * 0.5};
}

double contour_shift(const ModularParam& m) {
  const double rb = m.b.real(), rib = (1.0 / m.b).real();
  if (!(rb > 0.0) || !(rib > 0.0)) throw ContourError("ncqdl: Re b and Re 1/b must be positive");
  return 0.5 * pi * std::min(rb, rib);
}

// Below this Re b the poles pinch the shifted contour too tightly for the
// integral path to be usable.
constexpr double kMinIntegralReB = 0.02;

PrecisionBudget inner_budget(const PrecisionBudget& budget) {
  PrecisionBudget b = budget;
  b.rel_tol = std::min(budget.rel_tol, 1e-12);
  b.abs_tol = std::min(budget.abs_tol, 1e-15);
  b.max_refinements = std::max(budget.max_refinements, 4000);
  return b;
}

Complex log_ncqdl_integral(Complex z, const ModularParam& m, const PrecisionBudget& budget) {
  if (m.b.real() < kMinIntegralReB)
    throw ContourError("ncqdl: integral path unusable this close to b = i; use the product path");
  if (!(std::abs(z.imag()) < m.eta.real()))
    throw StripError("ncqdl: integral path requires |Im z| < Re eta");
  // On the shifted contour the integrand grows like e^{2 delta Re z}; for
  // Re z > 0 the value would be a tiny remainder of a huge oscillatory
  // integral, so evaluate at -z and use phi(z) phi(-z) = e^{i pi z^2 + i pi (b^2 + b^-2)/12}.
  if (z.real() > 0.0) {
    const Complex b2 = m.b * m.b;
    return kI * pi * z * z + kI * pi * (b2 + 1.0 / b2) / 12.0 - log_ncqdl_integral(-z, m, budget);
  }
  // Near the strip edge the integrand decays too slowly; step towards the
  // middle with phi(z) = phi(z - i c) / (1 + e^{2 pi c z - i pi c^2}), c = b or 1/b
  // (and the same relation read backwards below the real axis).
  if (std::abs(z.imag()) > 0.75 * m.eta.real()) {
    const double sgn = z.imag() > 0.0 ? 1.0 : -1.0;
    const Complex binv = 1.0 / m.b;
    const Complex c = std::abs(std::abs(z.imag()) - binv.real()) < std::abs(std::abs(z.imag()) - m.b.real()) ? binv : m.b;
    auto log1pexp = [](Complex u) { return u.real() > 0.0 ? u + clog1p(std::exp(-u)) : clog1p(std::exp(u)); };
    if (sgn > 0.0) return log_ncqdl_integral(z - kI * c, m, budget) - log1pexp(2.0 * pi * c * z - kI * pi * c * c);
    return log_ncqdl_integral(z + kI * c, m, budget) + log1pexp(2.0 * pi * c * z + kI * pi * c * c);
  }
  const double delta = contour_shift(m);
  const Complex b = m.b, binv = 1.0 / m.b;
  auto integrand = [&](double t) -> Complex {
    const Complex y{t, delta};
    const SinhSplit s1 = split_sinh(y * b);
    const SinhSplit s2 = split_sinh(y * binv);
    return std::exp(-2.0 * kI * y * z + s1.exponent + s2.exponent) / (y * s1.denom * s2.denom);
  };
  const double decay = 2.0 * (m.eta.real() - std::abs(z.imag()));
  quad::TailPolicy tail;
  tail.initial_cutoff = std::clamp(8.0 / decay, 4.0, 400.0);
  tail.stop_rel = 1e-16;
  PrecisionBudget inner = inner_budget(budget);
  // log phi is needed to absolute accuracy; 1e-16 sits at the Kronrod round-off floor.
  inner.abs_tol = 4e-14;
  const quad::QuadResult r = quad::integrate_line(integrand, tail, inner);
  return 0.25 * r.value;
}

Complex log_ncqdl_product(Complex z, const ModularParam& m, const PrecisionBudget& budget) {
  const Complex b = m.b;
  const Complex b2 = b * b;
  if (!(b2.imag() > 0.0)) throw DomainError("ncqdl: product path requires Im b^2 > 0");
  const Complex q = std::exp(kI * pi * b2);
  const Complex qt = std::exp(-kI * pi / b2);
  auto log_poch = [&](Complex x, Complex step) {
    // sum_k log(1 + x step^k)
    Complex sum{};
    Complex w = x;
    for (int k = 0; k <= budget.max_terms; ++k) {
      sum += clog1p(w);
      if (std::abs(w) < kSeriesEps && k > 0) return sum;
      w *= step;
    }
    throw ConvergenceError("ncqdl: product path exceeded max_terms");
  };
  return log_poch(q * std::exp(2.0 * pi * b * z), q * q) - log_poch(qt * std::exp(2.0 * pi * z / b), qt * qt);
}

}  // namespace

Complex log_ncqdl(Complex z, const ModularParam& b, const PrecisionBudget& budget, NcqdlPath path) {
  require_finite(z, "ncqdl");
  switch (path) {
    case NcqdlPath::Integral:
      return log_ncqdl_integral(z, b, budget);
    case NcqdlPath::Product:
      return log_ncqdl_product(z, b, budget);
    case NcqdlPath::Auto:
      return b.regime == Regime::UnitCircle ? log_ncqdl_product(z, b, budget)
                                            : log_ncqdl_integral(z, b, budget);
  }
  return {};
}

Complex ncqdl(Complex z, const ModularParam& b, const PrecisionBudget& budget, NcqdlPath path) {
  return std::exp(log_ncqdl(z, b, budget, path));
}

Complex log_kappa_hyperbolic(Complex alpha, const ModularParam& m, const PrecisionBudget& budget) {
  require_finite(alpha, "kappa_hyperbolic");
  const double eta_r = m.eta.real();
  if (!(std::abs(alpha.real()) < eta_r))
    throw StripError("kappa_hyperbolic: requires |Re alpha| < Re eta");
  if (m.b.real() < kMinIntegralReB)
    throw ContourError("kappa_hyperbolic: contour pinched too close to b = i");
  const double delta = std::min(contour_shift(m), 0.5 * pi / (4.0 * eta_r));
  const Complex b = m.b, binv = 1.0 / m.b, eta = m.eta;
  auto integrand = [&](double t) -> Complex {
    const Complex y{t, delta};
    const SinhSplit s1 = split_sinh(y * b);
    const SinhSplit s2 = split_sinh(y * binv);
    const SinhSplit c = split_cosh(2.0 * y * eta);
    return std::exp(4.0 * y * alpha + s1.exponent + s2.exponent + c.exponent) /
           (y * s1.denom * s2.denom * c.denom);
  };
  PrecisionBudget inner = inner_budget(budget);
  inner.abs_tol = 8e-14;
  inner.max_refinements = std::max(inner.max_refinements, 20000);

  // For alpha near +-eta one tail decays like 8 e^{-a |y|} / y with small a,
  // which no finite cutoff captures. Subtract g = 8 (e^{-a |y|} - e^{-(a+4) |y|}) / y
  // on that half line and add its integral back: +-8 log((a+4)/a) on the real
  // half line (Frullani), corrected by the segment [0, i delta].
  const Complex a_right = 4.0 * (eta - alpha), a_left = 4.0 * (eta + alpha);
  const bool sub_right = a_right.real() < 1.0, sub_left = a_left.real() < 1.0;
  auto g_right = [&](Complex y) { return 8.0 * (std::exp(-a_right * y) - std::exp(-(a_right + 4.0) * y)) / y; };
  auto g_left = [&](Complex y) { return 8.0 * (std::exp(a_left * y) - std::exp((a_left + 4.0) * y)) / y; };
  auto subtracted = [&](double t) -> Complex {
    const Complex y{t, delta};
    Complex v = integrand(t);
    if (sub_right && t > 0.0) v -= g_right(y);
    if (sub_left && t < 0.0) v -= g_left(y);
    return v;
  };
  auto segment = [&](const auto& g) {
    return quad::integrate_finite([&](double u) { return kI * g(Complex{0.0, u}); }, {0.0, delta}, inner).value;
  };
  Complex added{};
  if (sub_right) added += 8.0 * std::log((a_right + 4.0) / a_right) - segment(g_right);
  if (sub_left) added += -8.0 * std::log((a_left + 4.0) / a_left) + segment(g_left);

  const double decay = 4.0 * std::min(sub_right ? 1.0 : a_right.real(), sub_left ? 1.0 : a_left.real());
  quad::TailPolicy tail;
  tail.initial_cutoff = std::clamp(8.0 / decay, 4.0, 2000.0);
  tail.stop_rel = 1e-16;
  const quad::QuadResult r = quad::integrate_line(subtracted, tail, inner);
  return (r.value + added) / 8.0 + kI * pi * alpha * alpha - kI * pi * eta * eta / 3.0 + kI * pi / 24.0;
}

Complex kappa_hyperbolic(Complex alpha, const ModularParam& b, const PrecisionBudget& budget) {
  return std::exp(log_kappa_hyperbolic(alpha, b, budget));
}

}  // namespace yblab::specfun
