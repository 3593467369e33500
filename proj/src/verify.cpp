#include "yblab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace yblab::verify {

namespace {

using std::numbers::pi;
using weights::DualSpin;
using weights::EdgeWeight;
using weights::ModelKind;
using weights::Spin;
constexpr Complex kI{0.0, 1.0};

struct XN {
  double x;
  long n;
};

XN unpack(const AnySpin& s) {
  if (const auto* d = std::get_if<DualSpin>(&s)) return {d->x, d->n};
  return {std::get<Spin>(s).x, 0};
}

// Tolerances handed to the quadrature engine for a target relative residual.
PrecisionBudget inner_budget(const PrecisionBudget& outer) {
  PrecisionBudget b = outer;
  b.rel_tol = 0.01 * outer.rel_tol;
  b.abs_tol = 0.0;
  return b;
}

}  // namespace

void StarConfig::validate(const Model& model) const {
  for (const auto& s : outer) {
    const bool dual = std::holds_alternative<DualSpin>(s);
    if (dual != model.uses_dual_spins()) throw KindMismatch("StarConfig: spin kind does not match the model");
    const XN v = unpack(s);
    if (!std::isfinite(v.x)) throw NaNError("StarConfig: non-finite spin");
  }
  const double eta = model.eta();
  double sum = 0.0;
  for (double a : spectral) {
    if (!(a > 0.0 && a < eta)) throw DomainError("StarConfig: spectral values must lie in (0, eta)");
    sum += a;
  }
  if (std::abs(sum - eta) > 1e-12 * std::max(1.0, eta))
    throw DomainError("StarConfig: spectral values must sum to eta");
}

void finalize(VerificationReport& r, double tol) {
  r.abs_residual = std::abs(r.lhs - r.rhs);
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.rel_residual = scale > 0.0 ? r.abs_residual / scale : 0.0;
  r.r_factor = r.rhs != 0.0 ? r.lhs / r.rhs : std::numeric_limits<double>::quiet_NaN();
  r.passed = std::isfinite(r.rel_residual) && r.rel_residual <= tol && r.note.empty();
}

VerificationReport str_residual(const Model& model, const StarConfig& cfg, const PrecisionBudget& budget) {
  budget.validate();
  cfg.validate(model);
  const double eta = model.eta();
  const XN s1 = unpack(cfg.outer[0]), s2 = unpack(cfg.outer[1]), s3 = unpack(cfg.outer[2]);
  const EdgeWeight c1(model, eta - cfg.spectral[0]), c2(model, eta - cfg.spectral[1]),
      c3(model, eta - cfg.spectral[2]);
  const EdgeWeight t1(model, cfg.spectral[0]), t2(model, cfg.spectral[1]), t3(model, cfg.spectral[2]);

  VerificationReport rep;
  rep.rhs = std::exp(t1.log_value(s2.x, s2.n, s3.x, s3.n) + t2.log_value(s1.x, s1.n, s3.x, s3.n) +
                     t3.log_value(s2.x, s2.n, s1.x, s1.n));

  auto star = [&](double x0, long n0) {
    const double ls = weights::log_single_spin_weight(model, x0, n0);
    if (std::isinf(ls)) return 0.0;
    return std::exp(ls + c1.log_value(s1.x, s1.n, x0, n0) + c2.log_value(s2.x, s2.n, x0, n0) +
                    c3.log_value(s3.x, s3.n, x0, n0));
  };

  const PrecisionBudget qb = inner_budget(budget);
  try {
    quad::QuadResult res;
    switch (model.kind()) {
      case ModelKind::Elliptic:
        res = quad::integrate_finite([&](double x0) { return Complex{star(x0, 0)}; }, {0.0, pi}, qb);
        break;
      case ModelKind::Hyperbolic: {
        quad::TailPolicy tail;
        tail.initial_cutoff = 4.0;
        tail.stop_rel = qb.rel_tol;
        res = quad::integrate_line([&](double x0) { return Complex{star(x0, 0)}; }, tail, qb);
        break;
      }
      case ModelKind::Gamma: {
        // Outer sum over n0, inner line integral over x0; both tails are power laws.
        std::int64_t evals = 0;
        double inner_err = 0.0;
        quad::TailPolicy tail;
        tail.initial_cutoff = 8;
        tail.growth_factor = 1.5;
        tail.stop_rel = qb.rel_tol;
        tail.max_growth = 64;
        res = quad::sum_bilateral(
            [&](std::int64_t n0) {
              quad::TailPolicy lt;
              lt.initial_cutoff = 4.0 + 2.0 * static_cast<double>(std::llabs(n0));
              lt.stop_rel = qb.rel_tol;
              const auto r = quad::integrate_line([&](double x0) { return Complex{star(x0, static_cast<long>(n0))}; },
                                                  lt, qb);
              evals += r.evaluations;
              inner_err += r.error_estimate;
              return r.value;
            },
            tail, qb);
        res.evaluations = evals;
        res.error_estimate += inner_err;
        break;
      }
    }
    rep.lhs = res.value.real();
    rep.error_estimate = res.error_estimate;
    rep.budget_used = {res.truncation_used, res.evaluations};
  } catch (const BudgetExhausted& e) {
    rep.lhs = e.best_value();
    rep.error_estimate = e.error_estimate();
    rep.note = std::string("BudgetExhausted: ") + e.what();
  } catch (const Error& e) {
    rep.lhs = std::numeric_limits<double>::quiet_NaN();
    rep.note = e.what();
  }
  finalize(rep, budget.rel_tol);
  return rep;
}

double inversion_pointwise(const Model& model, double alpha, const AnySpin& s1, const AnySpin& s2) {
  const EdgeWeight plus(model, alpha), minus(model, -alpha);
  const double l = plus.log_value(s1, s2) + minus.log_value(s1, s2);
  return std::abs(std::expm1(l));
}

VerificationReport inversion_weak(const Model& model, double alpha, double x, const TestFunction& f,
                                  const PrecisionBudget& budget) {
  budget.validate();
  const auto* em = model.as_elliptic();
  if (!em) throw KindMismatch("inversion_weak: elliptic model required");
  const auto& nm = em->nomes;
  const double eta = nm.eta;
  if (!(alpha > 0.0 && alpha < eta)) throw DomainError("inversion_weak: requires 0 < alpha < eta");
  // Only the poles nearest to the real axis may cross it as the spectral value
  // passes eta; farther ones would need more residue terms.
  const double p = nm.p.real(), q = nm.q.real();
  if (!(alpha < std::min(-std::log(p), -std::log(q))))
    throw DomainError("inversion_weak: alpha too large for the single-residue continuation");

  const double gam = eta + alpha;
  const auto prod = specfun::EllipticGammaPath::Product;
  auto Phi = [&](Complex w) { return specfun::elliptic_gamma(w, nm, prod, budget); };
  auto F = [&](Complex u) { return Phi(u + kI * gam) / Phi(u - kI * gam); };
  const double inv_kappa = 1.0 / specfun::kappa_elliptic_continued(gam, nm);

  const Complex phi_hat = specfun::elliptic_gamma_reduced(kI * eta, nm, true);
  const Complex res_down = phi_hat / (2.0 * kI) / Phi(-kI * (eta + 2.0 * alpha));  // Res F at u = -i alpha
  const Complex res_up = Phi(kI * (eta + 2.0 * alpha)) * phi_hat / (-2.0 * kI);    // Res F at u = +i alpha

  PrecisionBudget qb = budget;
  qb.abs_tol = 0.0;
  std::int64_t evals = 0;

  auto G = [&](double z) -> Complex {
    const auto lit = quad::integrate_finite(
        [&](double y) { return F(z + y) * F(z - y) * inv_kappa * f(y); }, {0.0, pi}, qb);
    evals += lit.evaluations;
    const Complex Fp = F(2.0 * z + kI * alpha), Fm = F(2.0 * z - kI * alpha);
    const Complex r1 = inv_kappa * res_down * Fp * f(-z - kI * alpha);  // y = -z - i alpha, moved down
    const Complex r2 = inv_kappa * res_up * Fm * f(-z + kI * alpha);    // y = -z + i alpha, moved up
    const Complex r3 = -inv_kappa * res_down * Fp * f(z + kI * alpha);  // y = z + i alpha, moved up
    const Complex r4 = -inv_kappa * res_up * Fm * f(z - kI * alpha);    // y = z - i alpha, moved down
    return lit.value + 2.0 * pi * kI * (r1 + r4) - 2.0 * pi * kI * (r2 + r3);
  };

  // The continued G(z) has poles at z = -i alpha, +i alpha (and their pi/2
  // translates) that crossed the real z axis during the continuation; the
  // outer integral needs their residues as well.
  const double gam_out = eta - alpha;
  auto F_out = [&](Complex u) { return Phi(u + kI * gam_out) / Phi(u - kI * gam_out); };
  const double inv_kappa_out = 1.0 / specfun::kappa_elliptic(gam_out, nm, budget);
  auto h = [&](Complex z) {
    const Complex s = std::exp(0.5 * eta) / (2.0 * pi) * specfun::theta1(2.0 * z, nm.p) * specfun::theta1(2.0 * z, nm.q);
    return s * F_out(x + z) * F_out(x - z) * inv_kappa_out;
  };
  const Complex f0 = f(0.0), f1 = f(0.5 * pi);
  const Complex z_poles = -2.0 * pi * pi * inv_kappa *
                          (res_down * res_down * (h(-kI * alpha) * f0 + h(0.5 * pi - kI * alpha) * f1) +
                           res_up * res_up * (h(kI * alpha) * f0 + h(0.5 * pi + kI * alpha) * f1));

  const EdgeWeight w_cross(model, eta - alpha);
  VerificationReport rep;
  const double sx = std::exp(weights::log_single_spin_weight(model, x, 0));
  rep.rhs = ((f(x) + f(pi - x)) / (2.0 * sx)).real();
  try {
    const auto outer = quad::integrate_finite(
        [&](double z) {
          const double ls = weights::log_single_spin_weight(model, z, 0);
          if (std::isinf(ls)) return Complex{};
          return std::exp(ls + w_cross.log_value(x, 0, z, 0)) * G(z);
        },
        {0.0, pi}, qb);
    const Complex total = outer.value + z_poles;
    rep.lhs = total.real();
    rep.error_estimate = outer.error_estimate;
    rep.budget_used = {0.0, outer.evaluations + evals};
    if (std::abs(total.imag()) > 1e-6 * std::abs(total.real())) {
      std::ostringstream os;
      os << "imaginary part " << total.imag() << " left after continuation";
      rep.note = os.str();
    }
  } catch (const BudgetExhausted& e) {
    rep.lhs = e.best_value();
    rep.note = std::string("BudgetExhausted: ") + e.what();
  }
  finalize(rep, 1e-3);
  return rep;
}

void LimitSchedule::validate() const {
  if (control.size() < 3) throw ConfigError("LimitSchedule: at least 3 control values required");
  for (std::size_t i = 0; i < control.size(); ++i) {
    if (!(control[i] > 0.0)) throw ConfigError("LimitSchedule: control values must be positive");
    if (i > 0 && !(control[i] < control[i - 1]))
      throw ConfigError("LimitSchedule: control values must be strictly decreasing");
  }
}

std::vector<LimitPoint> hyperbolic_limit_residual(const LimitSchedule& schedule, const HyperbolicProbe& probe,
                                                  const PrecisionBudget& budget) {
  schedule.validate();
  const auto hm = Model::hyperbolic(specfun::ModularParam::real(probe.b), budget);
  const double log_hyp = EdgeWeight(hm, probe.alpha).log_value(probe.x, 0, probe.y, 0);
  std::vector<LimitPoint> out;
  for (double eps : schedule.control) {
    const auto em = Model::elliptic(std::exp(-probe.b * eps), std::exp(-eps / probe.b), budget);
    const double log_ell = EdgeWeight(em, probe.alpha * eps).log_value(probe.x * eps, 0, probe.y * eps, 0);
    const double divergent = pi * pi * probe.alpha / (2.0 * eps);
    out.push_back({eps, std::exp(log_ell - divergent - log_hyp)});
  }
  return out;
}

StrongCouplingResult strong_coupling_residual(const LimitSchedule& schedule, const StrongProbe& probe,
                                              const PrecisionBudget& budget) {
  schedule.validate();
  if (!(probe.beta > 0.0 && probe.beta < 1.0)) throw DomainError("strong_coupling_residual: requires 0 < beta < 1");
  const double beta = probe.beta;
  const auto gm = Model::gamma();
  const double log_gamma_w = EdgeWeight(gm, beta).log_value(probe.x, probe.m, probe.y, probe.n);
  const double log_gamma_norm =
      (specfun::log_gamma(0.5 * (1.0 + beta)) - specfun::log_gamma(0.5 * (1.0 - beta))).real();

  StrongCouplingResult out;
  for (double delta : schedule.control) {
    const auto b = specfun::ModularParam::unit_circle(0.5 * pi - delta);
    const auto hm = Model::hyperbolic(b, budget);
    const double eta = hm.eta();

    const double lw = EdgeWeight(hm, beta * eta)
                          .log_value(static_cast<double>(probe.m) + probe.x * eta, 0,
                                     static_cast<double>(probe.n) + probe.y * eta, 0);
    const double lpref = -5.0 * beta * std::log(2.0) - 3.0 * beta * std::log(pi * eta);
    out.weight.push_back({delta, std::exp(lw - lpref - log_gamma_w)});

    const double nn = static_cast<double>(probe.n);
    const double ls = weights::log_single_spin_weight(hm, nn + probe.x * eta, 0);
    out.spin_weight.push_back(
        {delta, std::exp(ls - std::log(8.0 * pi * pi * (probe.x * probe.x + nn * nn) * eta * eta))});

    const double lk = specfun::log_kappa_hyperbolic(beta * eta, b, budget).real();
    out.kappa.push_back({delta, std::exp(lk + beta * std::log(8.0 * pi * eta) + log_gamma_norm)});
  }
  return out;
}

StarConfig random_star_config(const Model& model, std::mt19937_64& rng) {
  StarConfig cfg;
  const bool elliptic = model.kind() == ModelKind::Elliptic;
  std::uniform_real_distribution<double> ux(elliptic ? 0.0 : -2.0, elliptic ? pi : 2.0);
  std::uniform_int_distribution<long> un(-2, 2);
  for (auto& s : cfg.outer) {
    if (model.uses_dual_spins()) {
      const double x = ux(rng);
      s = DualSpin{x, un(rng)};
    } else {
      s = Spin{ux(rng)};
    }
  }
  std::exponential_distribution<double> ex(1.0);
  for (;;) {
    double e[3] = {ex(rng), ex(rng), ex(rng)};
    const double sum = e[0] + e[1] + e[2];
    const double a0 = e[0] / sum, a1 = e[1] / sum;
    const double a2 = 1.0 - a0 - a1;
    if (a0 >= 0.1 && a1 >= 0.1 && a2 >= 0.1) {
      const double eta = model.eta();
      cfg.spectral = {a0 * eta, a1 * eta, 0.0};
      cfg.spectral[2] = eta - cfg.spectral[0] - cfg.spectral[1];
      break;
    }
  }
  return cfg;
}

std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

int default_threads() {
  if (const char* env = std::getenv("YBLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw ConfigError("YBLAB_THREADS must be a positive integer");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = default_threads();
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<VerificationReport> run_str_campaign(const Model& model, int count, double tol, std::uint64_t seed,
                                                 int threads, std::vector<StarConfig>* configs_out) {
  if (count < 1) throw ConfigError("count must be >= 1");
  std::vector<StarConfig> configs;
  configs.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto rng = item_rng(seed, static_cast<std::uint64_t>(i));
    configs.push_back(random_star_config(model, rng));
  }
  PrecisionBudget budget = model.budget();
  budget.rel_tol = tol;
  std::vector<VerificationReport> out(count);
  parallel_for(count, threads, [&](int i) { out[i] = str_residual(model, configs[i], budget); });
  if (configs_out) *configs_out = std::move(configs);
  return out;
}

InversionDraw random_inversion_draw(const Model& model, std::mt19937_64& rng) {
  const bool elliptic = model.kind() == ModelKind::Elliptic;
  std::uniform_real_distribution<double> ux(elliptic ? 0.0 : -2.0, elliptic ? pi : 2.0);
  std::uniform_int_distribution<long> un(-2, 2);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  auto spin = [&]() -> AnySpin {
    if (model.uses_dual_spins()) {
      const double x = ux(rng);
      return DualSpin{x, un(rng)};
    }
    return Spin{ux(rng)};
  };
  InversionDraw d;
  double u = 0.0;
  while (u == 0.0) u = ua(rng);
  d.alpha = u * model.eta();
  d.s1 = spin();
  d.s2 = spin();
  return d;
}

std::vector<NamedTestFunction> standard_test_functions() {
  return {
      {"one", [](Complex) { return Complex{1.0}; }},
      {"sin2", [](Complex y) { return std::sin(y) * std::sin(y); }},
      {"mixed", [](Complex y) { return std::cos(2.0 * y) + 0.5 * std::sin(4.0 * y) + 2.0; }},
      {"exp_cos", [](Complex y) { return std::exp(std::cos(2.0 * y)); }},
      {"cos6_shift", [](Complex y) { return 1.5 + std::cos(6.0 * y - 0.4); }},
  };
}

std::vector<double> standard_weak_points() { return {0.3, 0.9, 1.2, 2.4, 1.5}; }

std::vector<HyperbolicProbe> default_hyperbolic_probes() {
  return {{1.0, 0.3, 0.4, -0.2}, {1.0, 0.3, 0.0, 0.0}, {1.3, 0.2, 0.25, 0.1}};
}

std::vector<StrongProbe> default_strong_probes() {
  return {{0.5, 0, 0, 0.3, -0.1}, {0.3, 1, 0, 0.2, 0.4}, {0.7, 0, 1, -0.5, 0.2}};
}

bool shrinking(const std::vector<LimitPoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].ratio)) return false;
    if (i > 0 && !(std::abs(pts[i].ratio - 1.0) < std::abs(pts[i - 1].ratio - 1.0))) return false;
  }
  return !pts.empty();
}

}  // namespace yblab::verify
