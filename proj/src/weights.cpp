#include "yblab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace yblab::weights {

namespace {

using std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

struct Unpacked {
  double x;
  long n;
  bool dual;
};

Unpacked unpack(const AnySpin& s) {
  if (const auto* d = std::get_if<DualSpin>(&s)) return {d->x, d->n, true};
  return {std::get<Spin>(s).x, 0, false};
}

void check_kind(const Model& m, const Unpacked& s) {
  if (m.uses_dual_spins() != s.dual)
    throw KindMismatch(m.uses_dual_spins() ? "gamma model requires DualSpin arguments"
                                           : m.name() + " model requires Spin arguments");
}

// log sinh(u) for complex u, stable for large |Re u|.
Complex log_sinh(Complex u) {
  const double s = u.real() >= 0.0 ? 1.0 : -1.0;
  const Complex w = -2.0 * s * u;
  // 1 - e^w, written to keep precision when w is small
  const Complex one_minus = (std::abs(w) < 0.5) ? -2.0 * std::sinh(0.5 * w) * std::exp(0.5 * w) : 1.0 - std::exp(w);
  // sinh(u) = s e^{s u} (1 - e^{-2 s u}) / 2
  return s * u + std::log(one_minus) - std::log(2.0) + (s < 0 ? Complex{0.0, pi} : Complex{});
}

}  // namespace

double wrap_phase(double phi) {
  double r = std::remainder(phi, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

double canonical_spin(double x) {
  double r = std::fmod(x, pi);
  if (r < 0.0) r += pi;
  if (r >= pi) r = 0.0;
  return r;
}

SpectralParam SpectralParam::physical(double value, double model_eta) {
  if (!(value > 0.0 && value < model_eta))
    throw DomainError("SpectralParam: requires 0 < value < eta");
  return {value, model_eta};
}

Model Model::elliptic(double p, double q, const PrecisionBudget& budget) {
  auto nomes = specfun::EllipticNomes::real(p, q);
  return Model(EllipticModel{nomes}, nomes.eta, budget);
}

Model Model::hyperbolic(const specfun::ModularParam& b, const PrecisionBudget& budget) {
  return Model(HyperbolicModel{b}, b.eta.real(), budget);
}

Model Model::gamma() { return Model(GammaModel{}, 1.0, PrecisionBudget{}); }

ModelKind Model::kind() const noexcept {
  switch (variant_.index()) {
    case 0: return ModelKind::Elliptic;
    case 1: return ModelKind::Hyperbolic;
    default: return ModelKind::Gamma;
  }
}

std::string Model::name() const {
  switch (kind()) {
    case ModelKind::Elliptic: return "elliptic";
    case ModelKind::Hyperbolic: return "hyperbolic";
    case ModelKind::Gamma: return "gamma";
  }
  return {};
}

EdgeWeight::EdgeWeight(const Model& model, double alpha) : model_(model), alpha_(alpha) {
  if (!std::isfinite(alpha)) throw NaNError("EdgeWeight: non-finite spectral parameter");
  switch (model.kind()) {
    case ModelKind::Elliptic: {
      const auto& nm = model.as_elliptic()->nomes;
      if (std::abs(alpha) < nm.eta) {
        log_norm_ = -specfun::log_kappa_elliptic(alpha, nm, model.budget());
      } else {
        const double k = specfun::kappa_elliptic_continued(alpha, nm);
        log_norm_ = -std::log(Complex{k, 0.0});
      }
      break;
    }
    case ModelKind::Hyperbolic:
      log_norm_ = -specfun::log_kappa_hyperbolic(alpha, model.as_hyperbolic()->b, model.budget());
      break;
    case ModelKind::Gamma: {
      const double a = 0.5 * (1.0 - alpha), ap = 0.5 * (1.0 + alpha);
      log_norm_ = specfun::log_gamma(ap) - specfun::log_gamma(a);
      break;
    }
  }
}

double EdgeWeight::log_value(double x1, long n1, double x2, long n2) const {
  Complex acc = log_norm_;
  const double alpha = alpha_;
  switch (model_.kind()) {
    case ModelKind::Elliptic: {
      const auto& nm = model_.as_elliptic()->nomes;
      const auto& bud = model_.budget();
      const double sp = x1 + x2, sm = x1 - x2;
      acc += specfun::log_elliptic_gamma({sp, alpha}, nm, specfun::EllipticGammaPath::Auto, bud) -
             specfun::log_elliptic_gamma({sp, -alpha}, nm, specfun::EllipticGammaPath::Auto, bud) +
             specfun::log_elliptic_gamma({sm, alpha}, nm, specfun::EllipticGammaPath::Auto, bud) -
             specfun::log_elliptic_gamma({sm, -alpha}, nm, specfun::EllipticGammaPath::Auto, bud);
      break;
    }
    case ModelKind::Hyperbolic: {
      const auto& b = model_.as_hyperbolic()->b;
      const auto& bud = model_.budget();
      const double sp = x1 + x2, sm = x1 - x2;
      acc += 4.0 * pi * alpha * x1;
      acc += specfun::log_ncqdl({sp, alpha}, b, bud) - specfun::log_ncqdl({sp, -alpha}, b, bud) +
             specfun::log_ncqdl({sm, alpha}, b, bud) - specfun::log_ncqdl({sm, -alpha}, b, bud);
      break;
    }
    case ModelKind::Gamma: {
      const double a = 0.5 * (1.0 - alpha), ap = 0.5 * (1.0 + alpha);
      const double s1 = x1 + x2, s2 = x1 - x2;
      const double N1 = static_cast<double>(n1 + n2), N2 = static_cast<double>(n2 - n1);
      acc += specfun::gamma_pm_log(a, Complex{-N1, s1} * 0.5) + specfun::gamma_pm_log(a, Complex{-N2, s2} * 0.5) -
             specfun::gamma_pm_log(ap, Complex{N1, s1} * 0.5) - specfun::gamma_pm_log(ap, Complex{N2, s2} * 0.5);
      break;
    }
  }
  const double residue = wrap_phase(acc.imag());
  // The phases being cancelled grow like s log s; round-off grows with them.
  const double size = std::abs(x1) + std::abs(x2) + std::abs(static_cast<double>(n1)) + std::abs(static_cast<double>(n2));
  if (!(std::abs(residue) <= kRealityTol * std::max(1.0, size * std::log(2.0 + size)))) {
    std::ostringstream os;
    os << model_.name() << " edge weight: imaginary residue " << residue << " of log W at alpha=" << alpha
       << " (x1=" << x1 << ", x2=" << x2 << ")";
    throw RealityViolation(os.str());
  }
  return acc.real();
}

double EdgeWeight::log_value(const AnySpin& s1, const AnySpin& s2) const {
  const Unpacked a = unpack(s1), b = unpack(s2);
  check_kind(model_, a);
  check_kind(model_, b);
  return log_value(a.x, a.n, b.x, b.n);
}

double EdgeWeight::value(const AnySpin& s1, const AnySpin& s2) const { return std::exp(log_value(s1, s2)); }

double log_single_spin_weight(const Model& model, double x, long n) {
  switch (model.kind()) {
    case ModelKind::Elliptic: {
      const auto& nm = model.as_elliptic()->nomes;
      const double t = (specfun::theta1(2.0 * x, nm.p) * specfun::theta1(2.0 * x, nm.q)).real();
      if (t <= 0.0) return -std::numeric_limits<double>::infinity();
      return 0.5 * nm.eta - std::log(2.0 * pi) + std::log(t);
    }
    case ModelKind::Hyperbolic: {
      if (x == 0.0) return -std::numeric_limits<double>::infinity();
      const Complex b = model.as_hyperbolic()->b.b;
      const Complex l = std::log(2.0) + log_sinh(2.0 * pi * x * b) + log_sinh(2.0 * pi * x / b);
      return l.real();
    }
    case ModelKind::Gamma: {
      const double r2 = x * x + static_cast<double>(n) * static_cast<double>(n);
      if (r2 == 0.0) return -std::numeric_limits<double>::infinity();
      return std::log(r2) - std::log(4.0 * pi);
    }
  }
  return 0.0;
}

double single_spin_weight(const Model& model, const AnySpin& s) {
  const Unpacked u = unpack(s);
  check_kind(model, u);
  return std::exp(log_single_spin_weight(model, u.x, u.n));
}

double edge_weight(const Model& model, double alpha, const AnySpin& s1, const AnySpin& s2) {
  return EdgeWeight(model, alpha).value(s1, s2);
}

double edge_weight(const Model& model, SpectralParam alpha, const AnySpin& s1, const AnySpin& s2) {
  const SpectralParam checked = SpectralParam::physical(alpha.value, model.eta());
  return edge_weight(model, checked.value, s1, s2);
}

double crossed_edge_weight(const Model& model, double alpha, const AnySpin& s1, const AnySpin& s2) {
  return edge_weight(model, model.eta() - alpha, s1, s2);
}

}  // namespace yblab::weights
