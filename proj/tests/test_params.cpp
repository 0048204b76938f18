#include "doctest.h"

#include <cmath>
#include <random>

#include "common.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/params.hpp"

using namespace selfsim;
using doctest::Approx;

TEST_CASE("constants at the supercritical reference parameters") {
  const DerivedConstants c = derive_constants(testing::supercritical_case());
  CHECK(c.L == 13.0);
  CHECK(c.alpha == Approx(4.5 / 13.0).epsilon(1e-15));
  CHECK(c.beta == Approx(2.0 / 13.0).epsilon(1e-15));
  CHECK(c.alpha == Approx(0.346154).epsilon(1e-5));
  CHECK(c.beta == Approx(0.153846).epsilon(1e-5));
  CHECK(c.p_fujita == 4.5);
  CHECK_FALSE(c.subcritical);
  CHECK_FALSE(c.vss_integrable);
  CHECK(c.gamma0 == Approx(1.0 / (c.alpha * 4.0)).epsilon(1e-15));
}

TEST_CASE("Z0 and the singular amplitude at the subcritical reference parameters") {
  const DerivedConstants c = derive_constants(testing::subcritical_case());
  REQUIRE(c.Z0);
  CHECK(*c.Z0 == Approx(368.4375).epsilon(1e-14));
  REQUIRE(c.K_sing);
  CHECK(*c.K_sing == Approx(std::pow(3.0 * 368.4375, 2.5)).epsilon(1e-13));
  CHECK(*c.K_sing == Approx(4.062e7).epsilon(1e-3));
  CHECK(c.subcritical);
  CHECK(c.vss_integrable);
  // N beta - alpha = -3.3 / 9.8
  CHECK(3.0 * c.beta - c.alpha == Approx(-3.3 / 9.8).epsilon(1e-13));
}

TEST_CASE("Z0 is absent above m(N+sigma)/(N-2)") {
  // m(N+sigma)/(N-2) = 3 * 5.5 = 16.5 for N = 3
  const DerivedConstants c = derive_constants({3.0, 17.0, 2.5, 3});
  CHECK_FALSE(c.Z0);
  CHECK_FALSE(c.K_sing);
  CHECK(derive_constants({3.0, 17.0, 2.5, 2}).Z0);
  CHECK(derive_constants({3.0, 17.0, 2.5, 1}).Z0);
}

TEST_CASE("Fujita exponent") {
  CHECK(fujita_exponent(testing::supercritical_case()) == 4.5);
  CHECK(fujita_exponent({2.0, 3.0, 0.0, 2}) == 3.0);
}

TEST_CASE("validation names the violated bound") {
  auto msg = [](const ProblemParams& p) {
    try {
      derive_constants(p);
    } catch (const ParameterError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg({1.0, 5.0, 2.5, 3}).find("m must exceed 1") == 0);
  CHECK(msg({3.0, 3.0, 2.5, 3}).find("p must exceed m") == 0);
  CHECK(msg({3.0, 5.0, -0.5, 3}).find("sigma must be non-negative") == 0);
  CHECK(msg({3.0, 5.0, 2.5, 0}).find("dim must be at least 1") == 0);
  CHECK(msg({3.0, NAN, 2.5, 3}).find("exponents must be finite") == 0);
}

TEST_CASE("sigma = 0 needs the regression flag") {
  CHECK_THROWS_AS(Problem({2.0, 3.0, 0.0, 2}).require_weighted_regime(), ParameterError);
  CHECK_NOTHROW(Problem(testing::constant_case()).require_weighted_regime());
  CHECK_NOTHROW(Problem(testing::supercritical_case()).require_weighted_regime());
}

TEST_CASE("shoot parameter and amplitude") {
  const ProblemParams p = testing::supercritical_case();
  CHECK(amplitude_of_shoot(p, 0.0) == 0.0);
  CHECK(amplitude_of_shoot(p, 1.0) == Approx(0.5608).epsilon(1e-4));
  CHECK_THROWS_AS(amplitude_of_shoot(p, -1.0), ParameterError);
  double prev = 0.0;
  for (double C = 1e-6; C < 1e6; C *= 3.7) {
    const double A = amplitude_of_shoot(p, C);
    CHECK(A > prev);
    prev = A;
    CHECK(shoot_of_amplitude(p, A) == Approx(C).epsilon(1e-12));
  }
}

TEST_CASE("vss predicates") {
  CHECK(vss_predicates(testing::subcritical_case()).vss_integrable);
  CHECK_FALSE(vss_predicates(testing::supercritical_case()).vss_integrable);
  // At p = p_F the quantity N beta - alpha vanishes.
  const DerivedConstants c = derive_constants(testing::critical_p());
  CHECK(std::abs(3.0 * c.beta - c.alpha) < 1e-15);
  CHECK_FALSE(c.subcritical);
  // (sigma+2)/(p-m) = 2.25 < 3 at p = 5; 11.25 > 3 at p = 3.4
  CHECK_FALSE(vss_predicates(testing::supercritical_case()).tail_integrable);
  CHECK(vss_predicates(testing::subcritical_case()).tail_integrable);
}

TEST_CASE("identities over random tuples") {
  std::mt19937_64 rng(20261014);
  for (int i = 0; i < 10000; ++i) {
    const ProblemParams p = testing::random_params(rng);
    const DerivedConstants c = derive_constants(p);
    const double s2 = p.sigma + 2.0, gap = p.p - p.m;
    // alpha (p-m) = beta (sigma+2) up to rounding of the two quotients.
    REQUIRE(std::abs(c.alpha * gap - c.beta * s2) <= 4e-16 * c.alpha * gap);
    REQUIRE(c.alpha * gap == Approx(c.beta * s2).epsilon(1e-15));
    REQUIRE(c.p_fujita > p.m);
    REQUIRE(c.vss_integrable == c.subcritical);
    // K_sing = (m Z0)^{1/(p-m)} overflows for p close to m.
    if (c.K_sing && std::isfinite(*c.K_sing))
      REQUIRE(std::pow(*c.K_sing, gap) == Approx(p.m * *c.Z0).epsilon(1e-12));
  }
}
