#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "yblab/quad.hpp"
#include "yblab/weights.hpp"

namespace yblab::verify {

using weights::AnySpin;
using weights::Model;

/// Three outer spins and the spectral triple of one star-triangle instance.
struct StarConfig {
  std::array<AnySpin, 3> outer;
  std::array<double, 3> spectral;

  /// Checks spin kinds, 0 < alpha_i < eta and sum alpha_i = eta (to 1e-12).
  void validate(const Model& model) const;
};

struct BudgetUsed {
  double truncation = 0.0;  // final line cutoff, or final n0 shell for the gamma model
  std::int64_t evaluations = 0;
};

struct VerificationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double r_factor = 0.0;
  double error_estimate = 0.0;
  BudgetUsed budget_used;
  bool passed = false;
  std::string note;  // empty unless something went wrong
};

/// Fills abs/rel residual and r_factor from lhs and rhs; passed iff rel <= tol.
void finalize(VerificationReport& r, double tol);

/// Star side with crossed weights and the S measure versus the triangle side
/// W_a1(x2,x3) W_a2(x1,x3) W_a3(x2,x1). Numerical failures are reported in
/// `note` with passed = false rather than thrown; invalid configs throw.
VerificationReport str_residual(const Model& model, const StarConfig& cfg, const PrecisionBudget& budget);

/// |W_alpha(s1,s2) W_{-alpha}(s1,s2) - 1|.
double inversion_pointwise(const Model& model, double alpha, const AnySpin& s1, const AnySpin& s2);

/// Test function for the weak inversion relation: evaluated at complex
/// points, so it must be entire and pi-periodic (trigonometric polynomials).
using TestFunction = std::function<Complex(Complex)>;

/// Weak form of the second inversion relation for the elliptic model:
///   int dz s(z) W_{eta-alpha}(x,z) int dy W_{eta+alpha}(z,y) f(y)
/// versus (f(x) + f(pi-x)) / (2 s(x)). The inner integral is the analytic
/// continuation from spectral values below eta; it picks up residues from the
/// weight poles that cross the real axis.
VerificationReport inversion_weak(const Model& model, double alpha, double x, const TestFunction& f,
                                  const PrecisionBudget& budget);

struct LimitSchedule {
  std::vector<double> control;
  void validate() const;  // strictly decreasing, positive, >= 3 entries
};

struct LimitPoint {
  double control;
  double ratio;
};

struct HyperbolicProbe {
  double b = 1.0;
  double alpha = 0.3;
  double x = 0.4;
  double y = -0.2;
};

/// Elliptic weight at p = e^{-b eps}, q = e^{-eps/b}, spins x eps, y eps and
/// spectral alpha eps, over the hyperbolic weight at (x, y; alpha). The
/// spin-independent divergent factor exp(pi^2 alpha / (2 eps)) is divided out.
std::vector<LimitPoint> hyperbolic_limit_residual(const LimitSchedule& schedule, const HyperbolicProbe& probe,
                                                  const PrecisionBudget& budget = {});

struct StrongProbe {
  double beta = 0.5;
  long m = 0;
  long n = 0;
  double x = 0.3;
  double y = -0.1;
};

struct StrongCouplingResult {
  std::vector<LimitPoint> weight;       // W_{beta eta}(m + x eta, n + y eta) / asymptotic form
  std::vector<LimitPoint> spin_weight;  // S(n + x eta) / (8 pi^2 (x^2 + n^2) eta^2)
  std::vector<LimitPoint> kappa;        // kappa(beta eta) (8 pi eta)^beta Gamma((1+beta)/2) / Gamma((1-beta)/2)
};

/// Strong-coupling sweep b = e^{i(pi/2 - delta)}, eta = sin delta.
StrongCouplingResult strong_coupling_residual(const LimitSchedule& schedule, const StrongProbe& probe,
                                              const PrecisionBudget& budget = {});

/// Seeded random star configuration: x ~ U[-2,2] (U[0,pi) for elliptic),
/// n ~ U{-2..2}, spectral triple from a flat simplex draw with every
/// component >= 0.1 (times eta).
StarConfig random_star_config(const Model& model, std::mt19937_64& rng);

/// Independent generator for campaign item `index`.
std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t index);

/// Number of worker threads: YBLAB_THREADS if set, else hardware concurrency.
int default_threads();

/// Runs `count` random star checks in parallel; results ordered by item index.
std::vector<VerificationReport> run_str_campaign(const Model& model, int count, double tol, std::uint64_t seed,
                                                 int threads = 0,
                                                 std::vector<StarConfig>* configs_out = nullptr);

struct InversionDraw {
  double alpha;
  AnySpin s1;
  AnySpin s2;
};

/// alpha ~ U(0, eta); spins drawn as in random_star_config.
InversionDraw random_inversion_draw(const Model& model, std::mt19937_64& rng);

struct NamedTestFunction {
  std::string name;
  TestFunction f;
};

/// Five entire pi-periodic test functions for the weak inversion relation.
std::vector<NamedTestFunction> standard_test_functions();
/// Five spins in (0, pi); the last one sits next to the self-image point pi/2.
std::vector<double> standard_weak_points();

std::vector<HyperbolicProbe> default_hyperbolic_probes();
std::vector<StrongProbe> default_strong_probes();

/// |ratio - 1| strictly decreasing along the sweep.
bool shrinking(const std::vector<LimitPoint>& pts);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace yblab::verify
