#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "yblab/verify.hpp"

using namespace yblab;
using namespace yblab::verify;
using weights::DualSpin;
using weights::Spin;
using std::numbers::pi;

TEST_SUITE("verify") {

TEST_CASE("elliptic star-triangle with unit R factor") {
  const auto m = Model::elliptic(0.3, 0.3);
  const double eta = m.eta();
  StarConfig cfg{{Spin{0.5}, Spin{1.1}, Spin{2.0}}, {0.2 * eta, 0.3 * eta, 0.5 * eta}};
  PrecisionBudget b;
  b.rel_tol = 1e-10;
  const auto r = str_residual(m, cfg, b);
  CHECK(r.passed);
  CHECK(std::abs(r.r_factor - 1.0) <= 1e-8);
  CHECK(r.rel_residual == doctest::Approx(std::abs(r.lhs - r.rhs) / std::max(std::abs(r.lhs), std::abs(r.rhs))));
  CHECK(r.budget_used.evaluations > 0);
}

TEST_CASE("gamma star-triangle at the symmetric point") {
  const auto m = Model::gamma();
  StarConfig cfg{{DualSpin{0, 0}, DualSpin{0, 0}, DualSpin{0, 0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  PrecisionBudget b;
  b.rel_tol = 1e-7;
  const auto r = str_residual(m, cfg, b);
  CHECK(r.lhs > 0.0);
  CHECK(r.rhs > 0.0);
  CHECK(r.rel_residual <= 1e-6);
  CHECK(r.note.empty());
}

TEST_CASE("gamma star-triangle with a nearly vanishing spectral value") {
  const auto m = Model::gamma();
  StarConfig cfg{{DualSpin{0.4, 1}, DualSpin{-1.3, -2}, DualSpin{0.9, 0}}, {0.6, 0.4 - 1e-6, 1e-6}};
  PrecisionBudget b;
  b.rel_tol = 1e-6;
  const auto r = str_residual(m, cfg, b);
  CHECK(r.rel_residual <= 1e-5);
  CHECK(weights::edge_weight(m, 1e-6, cfg.outer[1], cfg.outer[0]) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("relabelling the star leaves both sides unchanged") {
  const auto m = Model::elliptic(0.5, 0.3);
  const double eta = m.eta();
  StarConfig cfg{{Spin{0.3}, Spin{2.2}, Spin{1.4}}, {0.25 * eta, 0.45 * eta, 0.3 * eta}};
  StarConfig rot{{cfg.outer[1], cfg.outer[2], cfg.outer[0]}, {cfg.spectral[1], cfg.spectral[2], cfg.spectral[0]}};
  PrecisionBudget b;
  b.rel_tol = 1e-10;
  const auto r1 = str_residual(m, cfg, b);
  const auto r2 = str_residual(m, rot, b);
  CHECK(r1.lhs == doctest::Approx(r2.lhs).epsilon(1e-9));
  CHECK(r1.rhs == doctest::Approx(r2.rhs).epsilon(1e-12));
}

TEST_CASE("unattainable tolerance is reported, not thrown") {
  const auto m = Model::elliptic(0.3, 0.3);
  const double eta = m.eta();
  StarConfig cfg{{Spin{0.5}, Spin{1.1}, Spin{2.0}}, {0.2 * eta, 0.3 * eta, 0.5 * eta}};
  PrecisionBudget b;
  b.rel_tol = 1e-30;
  const auto r = str_residual(m, cfg, b);
  CHECK_FALSE(r.passed);
  CHECK(r.note.find("BudgetExhausted") != std::string::npos);
}

TEST_CASE("star configuration validation") {
  const auto m = Model::gamma();
  StarConfig bad_sum{{DualSpin{}, DualSpin{}, DualSpin{}}, {0.3, 0.3, 0.3}};
  CHECK_THROWS_AS(bad_sum.validate(m), DomainError);
  StarConfig bad_kind{{Spin{}, Spin{}, Spin{}}, {0.3, 0.3, 0.4}};
  CHECK_THROWS_AS(bad_kind.validate(m), KindMismatch);
}

TEST_CASE("pointwise inversion") {
  const auto g = Model::gamma();
  CHECK(inversion_pointwise(g, 0.5, DualSpin{0.3, 1}, DualSpin{-0.2, 0}) <= 1e-10);
  const auto h = Model::hyperbolic(specfun::ModularParam::real(1.3));
  CHECK(inversion_pointwise(h, 0.4, Spin{0.7}, Spin{-0.7}) <= 1e-9);
  const auto e = Model::elliptic(0.3, 0.5);
  CHECK(inversion_pointwise(e, 0.0, Spin{0.7}, Spin{0.1}) <= 1e-14);
  auto rng = item_rng(1, 0);
  for (int i = 0; i < 50; ++i) {
    const auto d = random_inversion_draw(e, rng);
    CHECK(inversion_pointwise(e, d.alpha, d.s1, d.s2) <= 1e-9);
  }
}

TEST_CASE("weak inversion for a constant test function") {
  const auto m = Model::elliptic(0.3, 0.3);
  const auto r = inversion_weak(m, 0.3 * m.eta(), 0.9, [](Complex) { return Complex{1.0}; }, {});
  const double s = weights::single_spin_weight(m, Spin{0.9});
  CHECK(r.rhs == doctest::Approx(1.0 / s).epsilon(1e-12));
  CHECK(r.rel_residual <= 1e-3);
  CHECK_THROWS_AS(inversion_weak(Model::gamma(), 0.3, 0.9, [](Complex) { return Complex{1.0}; }, {}), KindMismatch);
}

TEST_CASE("limit schedules") {
  const LimitSchedule too_short{{0.2, 0.1}}, rising{{0.2, 0.3, 0.1}}, zero{{0.2, 0.1, 0.0}};
  CHECK_THROWS_AS(too_short.validate(), ConfigError);
  CHECK_THROWS_AS(rising.validate(), ConfigError);
  CHECK_THROWS_AS(zero.validate(), ConfigError);
  const auto pts = hyperbolic_limit_residual(LimitSchedule{{0.2, 0.1, 0.05}}, HyperbolicProbe{});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].ratio > 0.0);
  CHECK(std::isfinite(pts[0].ratio));
  CHECK(shrinking(pts));
  CHECK_FALSE(shrinking({{0.2, 1.1}, {0.1, 1.2}}));
}

TEST_CASE("random configurations respect the sampling domain") {
  const auto m = Model::gamma();
  for (int i = 0; i < 200; ++i) {
    auto rng = item_rng(9, i);
    const auto c = random_star_config(m, rng);
    CHECK_NOTHROW(c.validate(m));
    for (double a : c.spectral) CHECK(a >= 0.1 - 1e-15);
    for (const auto& s : c.outer) {
      const auto& d = std::get<DualSpin>(s);
      CHECK(std::abs(d.x) <= 2.0);
      CHECK(std::abs(d.n) <= 2);
    }
  }
}

TEST_CASE("campaigns are deterministic and independent of thread count") {
  const auto m = Model::elliptic(0.3, 0.5);
  std::vector<StarConfig> c1, c2;
  const auto a = run_str_campaign(m, 4, 1e-8, 5, 1, &c1);
  const auto b = run_str_campaign(m, 4, 1e-8, 5, 3, &c2);
  for (int i = 0; i < 4; ++i) {
    CHECK(a[i].lhs == b[i].lhs);
    CHECK(a[i].rhs == b[i].rhs);
    CHECK(std::get<Spin>(c1[i].outer[0]).x == std::get<Spin>(c2[i].outer[0]).x);
    CHECK(a[i].passed);
  }
}

TEST_CASE("thread count from the environment") {
  setenv("YBLAB_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  setenv("YBLAB_THREADS", "zero", 1);
  CHECK_THROWS_AS(default_threads(), ConfigError);
  unsetenv("YBLAB_THREADS");
  CHECK(default_threads() >= 1);
}

}  // TEST_SUITE
