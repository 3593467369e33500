#include <doctest.h>

#include <cmath>
#include <numbers>

#include "yblab/quad.hpp"

using namespace yblab;
using namespace yblab::quad;
using std::numbers::pi;

TEST_SUITE("quad") {

TEST_CASE("integrate_finite on smooth integrands") {
  const auto r = integrate_finite([](double x) { return Complex{std::sin(x), 0.0}; }, {0.0, pi}, {});
  CHECK(std::abs(r.value - 2.0) <= 1e-13);
  CHECK(r.error_estimate <= 1e-12);
  const auto c = integrate_finite([](double x) { return std::exp(Complex{0.0, 3.0 * x}); }, {0.0, 1.0}, {});
  CHECK(std::abs(c.value - (std::exp(Complex{0.0, 3.0}) - 1.0) / Complex{0.0, 3.0}) <= 1e-13);
}

TEST_CASE("integrate_finite adapts to a near-singular peak") {
  const double eps = 1e-3;
  const auto r = integrate_finite([&](double x) { return Complex{eps / (x * x + eps * eps), 0.0}; }, {-1.0, 1.0}, {});
  CHECK(std::abs(r.value.real() - 2.0 * std::atan(1.0 / eps)) <= 1e-11);
}

TEST_CASE("integrate_finite budget and domain errors") {
  PrecisionBudget tight;
  tight.rel_tol = 1e-15;
  tight.abs_tol = 0.0;
  tight.max_refinements = 3;
  CHECK_THROWS_AS(integrate_finite([](double x) { return Complex{std::sqrt(std::abs(x)), 0.0}; }, {-1.0, 1.0}, tight),
                  BudgetExhausted);
  CHECK_THROWS_AS(integrate_finite([](double) { return Complex{1.0}; }, {1.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(integrate_finite([](double) { return Complex{NAN}; }, {0.0, 1.0}, {}), NaNError);
}

TEST_CASE("BudgetExhausted carries the best value") {
  PrecisionBudget tight;
  tight.rel_tol = 1e-15;
  tight.abs_tol = 0.0;
  tight.max_refinements = 2;
  try {
    integrate_finite([](double x) { return Complex{std::sqrt(x), 0.0}; }, {0.0, 1.0}, tight);
    FAIL("expected BudgetExhausted");
  } catch (const BudgetExhausted& e) {
    CHECK(std::abs(e.best_value() - 2.0 / 3.0) < 1e-2);
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("integrate_line with Gaussian and exponential decay") {
  TailPolicy tail;
  tail.initial_cutoff = 1.0;
  const auto g = integrate_line([](double x) { return Complex{std::exp(-x * x), 0.0}; }, tail, {});
  CHECK(std::abs(g.value.real() - std::sqrt(pi)) <= 1e-12);
  CHECK(g.truncation_used >= 4.0);
  const auto e = integrate_line([](double x) { return Complex{1.0 / std::cosh(x), 0.0}; }, tail, {});
  CHECK(std::abs(e.value.real() - pi) <= 1e-11);
}

TEST_CASE("integrate_line reports a non-decaying tail") {
  TailPolicy tail;
  tail.max_growth = 6;
  CHECK_THROWS_AS(integrate_line([](double) { return Complex{1.0}; }, tail, {}), TailNotDecaying);
}

TEST_CASE("sum_bilateral with geometric and power-law terms") {
  TailPolicy tail;
  const auto g = sum_bilateral([](std::int64_t n) { return Complex{std::exp(-std::abs(static_cast<double>(n))), 0.0}; },
                               tail, {});
  CHECK(std::abs(g.value.real() - 1.0 / std::tanh(0.5)) <= 1e-12);

  tail.stop_rel = 1e-3;
  const auto p = sum_bilateral([](std::int64_t n) { return Complex{1.0 / (1.0 + static_cast<double>(n * n)), 0.0}; },
                               tail, {});
  const double exact = pi / std::tanh(pi);
  CHECK(std::abs(p.value.real() - exact) <= 1.5 * p.error_estimate);
  CHECK(p.error_estimate <= 1e-2);
}

TEST_CASE("power_law_tail fit") {
  // shells 2/n^2 at n = 99, 100: remaining tail ~ 2/100
  const double t = power_law_tail(2.0 / (99.0 * 99.0), 2.0 / (100.0 * 100.0), 100.0);
  CHECK(t == doctest::Approx(0.02).epsilon(0.02));
  CHECK(std::isinf(power_law_tail(1.0, 1.0, 10.0)));
  CHECK(power_law_tail(1.0, 0.0, 10.0) == 0.0);
}

TEST_CASE("policy validation") {
  TailPolicy bad;
  bad.growth_factor = 1.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  PrecisionBudget b;
  b.rel_tol = 0.0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
}

}  // TEST_SUITE
