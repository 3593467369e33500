#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "yblab/weights.hpp"

using namespace yblab;
using namespace yblab::weights;
using std::numbers::pi;

TEST_SUITE("weights") {

TEST_CASE("elliptic weights against reference values") {
  for (const auto& c : oracle::kEllWeight) {
    const auto m = Model::elliptic(c.p, c.q);
    CHECK(edge_weight(m, c.alpha, Spin{c.x}, Spin{c.y}) == doctest::Approx(c.value).epsilon(1e-12));
  }
  for (const auto& c : oracle::kEllSpin) {
    const auto m = Model::elliptic(c.p, c.q);
    CHECK(single_spin_weight(m, Spin{c.x}) == doctest::Approx(c.value).epsilon(1e-12));
  }
}

TEST_CASE("hyperbolic weights against reference values") {
  for (const auto& c : oracle::kHypWeight) {
    const auto m = Model::hyperbolic(specfun::ModularParam::real(c.b));
    CHECK(edge_weight(m, c.alpha, Spin{c.x}, Spin{c.y}) == doctest::Approx(c.value).epsilon(1e-10));
  }
  const auto m = Model::hyperbolic(specfun::ModularParam::real(1.3));
  const double x = 0.6;
  CHECK(single_spin_weight(m, Spin{x}) ==
        doctest::Approx(2.0 * std::sinh(2.0 * pi * x * 1.3) * std::sinh(2.0 * pi * x / 1.3)).epsilon(1e-13));
}

TEST_CASE("gamma weights against reference values") {
  const auto m = Model::gamma();
  for (const auto& c : oracle::kGammaWeight) {
    CAPTURE(c.beta);
    CHECK(edge_weight(m, c.beta, DualSpin{c.x, c.n}, DualSpin{c.y, c.m}) == doctest::Approx(c.value).epsilon(1e-12));
  }
  CHECK(single_spin_weight(m, DualSpin{0.5, 2}) == doctest::Approx((0.25 + 4.0) / (4.0 * pi)).epsilon(1e-15));
  CHECK(single_spin_weight(m, DualSpin{0.0, 0}) == 0.0);
  CHECK(std::isinf(log_single_spin_weight(m, 0.0, 0)));
}

TEST_CASE("spin reflection symmetry and positivity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ua(0.05, 0.95);
  std::uniform_int_distribution<long> un(-2, 2);
  const Model models[] = {Model::elliptic(0.3, 0.5), Model::hyperbolic(specfun::ModularParam::real(1.0)),
                          Model::hyperbolic(specfun::ModularParam::unit_circle(0.6)), Model::gamma()};
  for (const auto& m : models) {
    for (int i = 0; i < 20; ++i) {
      const double alpha = ua(rng) * m.eta();
      AnySpin a, b;
      if (m.uses_dual_spins()) {
        a = DualSpin{u(rng), un(rng)};
        b = DualSpin{u(rng), un(rng)};
      } else {
        a = Spin{u(rng)};
        b = Spin{u(rng)};
      }
      const double w1 = edge_weight(m, alpha, a, b);
      const double w2 = edge_weight(m, alpha, b, a);
      CAPTURE(m.name());
      CHECK(w1 > 0.0);
      CHECK(std::abs(w1 / w2 - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("elliptic periodicity") {
  const auto m = Model::elliptic(0.3, 0.3);
  const double alpha = 0.4 * m.eta();
  const double w = edge_weight(m, alpha, Spin{0.3}, Spin{1.2});
  CHECK(edge_weight(m, alpha, Spin{0.3 + pi}, Spin{1.2}) == doctest::Approx(w).epsilon(1e-12));
  CHECK(edge_weight(m, alpha, Spin{0.3}, Spin{1.2 - pi}) == doctest::Approx(w).epsilon(1e-12));
  CHECK(single_spin_weight(m, Spin{0.3 + pi}) == doctest::Approx(single_spin_weight(m, Spin{0.3})).epsilon(1e-12));
  CHECK(canonical_spin(-0.5) == doctest::Approx(pi - 0.5));
}

TEST_CASE("zero spectral parameter gives unit weight") {
  const Model models[] = {Model::elliptic(0.3, 0.5), Model::hyperbolic(specfun::ModularParam::real(1.3)), Model::gamma()};
  for (const auto& m : models) {
    const AnySpin a = m.uses_dual_spins() ? AnySpin(DualSpin{0.7, 1}) : AnySpin(Spin{0.7});
    const AnySpin b = m.uses_dual_spins() ? AnySpin(DualSpin{-0.4, 0}) : AnySpin(Spin{-0.4});
    CHECK(edge_weight(m, 0.0, a, b) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("crossed weight uses eta - alpha") {
  const auto m = Model::elliptic(0.3, 0.3);
  const double a = 0.2 * m.eta();
  CHECK(crossed_edge_weight(m, a, Spin{0.4}, Spin{1.0}) == edge_weight(m, m.eta() - a, Spin{0.4}, Spin{1.0}));
}

TEST_CASE("argument validation") {
  const auto g = Model::gamma();
  CHECK_THROWS_AS(edge_weight(g, 0.5, Spin{0.1}, Spin{0.2}), KindMismatch);
  CHECK_THROWS_AS(edge_weight(Model::elliptic(0.3, 0.3), 0.1, DualSpin{0.1, 0}, Spin{0.2}), KindMismatch);
  CHECK_THROWS_AS(SpectralParam::physical(1.2, 1.0), DomainError);
  CHECK_THROWS_AS(EdgeWeight(g, NAN), NaNError);
  CHECK(g.eta() == 1.0);
  CHECK(Model::hyperbolic(specfun::ModularParam::real(1.0)).eta() == doctest::Approx(1.0));
}

}  // TEST_SUITE
