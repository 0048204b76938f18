#include "doctest.h"

#include <cmath>
#include <random>

#include "common.hpp"
#include "selfsim/asymptotics.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/profile.hpp"

using namespace selfsim;
using doctest::Approx;

TEST_CASE("origin series at xi = 0") {
  const Problem pb(testing::subcritical_case());
  for (auto order : {SeriesOrder::kTwoTerm, SeriesOrder::kFull}) {
    const SeriesValue v = origin_eval(pb, 0.7, 0.0, order);
    CHECK(v.f == 0.7);
    CHECK(v.fm_deriv == 0.0);
  }
}

TEST_CASE("two-term origin law") {
  const Problem pb(testing::subcritical_case());
  const SeriesValue v = origin_eval(pb, 1.0, 0.1, SeriesOrder::kTwoTerm);
  CHECK(pb.alpha() == Approx(0.4591837).epsilon(1e-7));
  CHECK(std::pow(v.f, 3.0) == Approx(1.0 - 0.4591837 * 0.01 / 6.0).epsilon(1e-9));
  CHECK(v.f == Approx(0.9997450).epsilon(1e-7));
  CHECK(v.fm_deriv == Approx(-pb.alpha() * 0.1 / 3.0).epsilon(1e-14));

  // Against an accurate integration launched at 1e-6.
  IntegrationControls c;
  c.xi_start = 1e-6;
  c.xi_max = 0.1;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-15;
  const ProfileTrajectory t = integrate_profile(pb, 1.0, c);
  REQUIRE(t.terminal_event == ProfileEvent::kReachedXiMax);
  CHECK(t.samples.back().f == Approx(v.f).epsilon(1e-6));
  const SeriesValue full = origin_eval(pb, 1.0, 0.1, SeriesOrder::kFull);
  CHECK(std::abs(t.samples.back().f - full.f) < 1e-9);
}

TEST_CASE("absorption coefficient of the origin series") {
  const Problem pb(testing::subcritical_case());
  const OriginExpansion ex = origin_expansion(pb, 1.0, SeriesOrder::kFull);
  CHECK(ex.sigma_term_coeff == Approx(1.0 / (4.5 * 5.5)).epsilon(1e-15));
  CHECK(ex.sigma_term_coeff == Approx(0.0404040).epsilon(1e-6));
  const OriginExpansion ex2 = origin_expansion(pb, 2.0, SeriesOrder::kFull);
  CHECK(ex2.sigma_term_coeff == Approx(std::pow(2.0, 3.4) / (4.5 * 5.5)).epsilon(1e-15));
}

TEST_CASE("PME coefficients") {
  const Problem pb(testing::subcritical_case());
  const double A = 0.8;
  const auto b = pme_series_coeffs(pb, A, 8);
  REQUIRE(b.size() == 9);
  CHECK(b[0] == Approx(std::pow(A, 3.0)).epsilon(1e-15));
  CHECK(b[2] == Approx(-pb.alpha() * A / 6.0).epsilon(1e-15));
  for (std::size_t j = 1; j < b.size(); j += 2) CHECK(b[j] == 0.0);

  // The truncated series solves the PME part of the equation to high order:
  // the residual of  (F)'' + (N-1)F'/xi + alpha phi + beta xi phi'  with
  // F = phi^m decays like xi^8 when coefficients through xi^8 are kept.
  auto residual = [&](double xi) {
    double F = 0, dF = 0, d2F = 0;
    for (int j = 8; j >= 0; --j) F = F * xi + b[j];
    for (int j = 8; j >= 1; --j) dF = dF * xi + j * b[j];
    for (int j = 8; j >= 2; --j) d2F = d2F * xi + j * (j - 1) * b[j];
    const double phi = std::pow(F, 1.0 / 3.0);
    const double dphi = dF / (3.0 * phi * phi);
    return d2F + 2.0 * dF / xi + pb.alpha() * phi + pb.beta() * xi * dphi;
  };
  const double r1 = std::abs(residual(0.2)), r2 = std::abs(residual(0.1));
  CHECK(r1 < 1e-6);
  CHECK(std::log2(r1 / r2) > 7.5);
}

TEST_CASE("series orders agree to O(xi^4)") {
  std::mt19937_64 rng(7);
  int compared = 0;
  for (int i = 0; i < 20; ++i) {
    const Problem pb(testing::random_params(rng));
    const double A = 0.5;
    const double xi = 5.0 * default_launch_radius(pb, A);
    auto diff = [&](double x) {
      const double a = std::pow(origin_eval(pb, A, x, SeriesOrder::kTwoTerm).f, pb.m());
      const double b = std::pow(origin_eval(pb, A, x, SeriesOrder::kFull).f, pb.m());
      return std::abs(a - b);
    };
    const double d1 = diff(xi), d2 = diff(0.5 * xi);
    if (d2 == 0.0) continue;
    ++compared;
    const double need = std::pow(2.0, std::min(4.0, pb.sigma() + 2.0));
    CHECK_MESSAGE(d1 / d2 >= 0.95 * need, "sigma=", pb.sigma(), " ratio=", d1 / d2);
  }
  CHECK(compared >= 15);
}

TEST_CASE("series validity") {
  const Problem pb(testing::subcritical_case());
  CHECK_THROWS_AS(origin_eval(pb, 1.0, 10.0, SeriesOrder::kTwoTerm), SeriesValidityError);
  CHECK_NOTHROW(origin_eval(pb, 1.0, default_launch_radius(pb, 1.0), SeriesOrder::kFull));
  CHECK_THROWS_AS(origin_eval(pb, 1.0, -1.0, SeriesOrder::kFull), DomainError);
  CHECK_THROWS_AS(origin_eval(pb, 0.0, 0.1, SeriesOrder::kFull), ParameterError);
}

TEST_CASE("integer sigma keeps one more PME term") {
  CHECK(pme_series_order(Problem({3.0, 5.0, 2.5, 3})) == 4);
  CHECK(pme_series_order(Problem({3.0, 5.0, 2.0, 3})) == 4);
  CHECK(pme_series_order(Problem({3.0, 5.0, 1.0, 3})) == 3);
  CHECK(pme_series_order(Problem({3.0, 5.0, 0.5, 3})) == 2);
}

TEST_CASE("interface law") {
  const Problem pb(testing::subcritical_case());
  const InterfaceLaw law = interface_law(pb, 1.0);
  CHECK(pb.beta() == Approx(0.0408163).epsilon(1e-6));
  CHECK(law.xi0 == Approx(std::sqrt(6.0 / (pb.beta() * 2.0))).epsilon(1e-15));
  CHECK(law.xi0 == Approx(8.5732).epsilon(1e-5));
  CHECK(law.f(law.xi0) == 0.0);
  CHECK(law.fm_deriv(law.xi0) == 0.0);
  CHECK(law.f(0.0) == 1.0);
  CHECK(interface_law(pb, 4.0).f(0.0) == Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(interface_law(pb, 0.0), ParameterError);

  // (f^m)' = -beta xi f on (0, xi0), checked against a central difference.
  for (double xi = 0.5; xi < law.xi0 - 0.5; xi += 0.5) {
    CHECK(law.fm_deriv(xi) == Approx(-pb.beta() * xi * law.f(xi)).epsilon(1e-10));
    const double h = 1e-5;
    const double fd = (std::pow(law.f(xi + h), 3.0) - std::pow(law.f(xi - h), 3.0)) / (2 * h);
    CHECK(fd == Approx(law.fm_deriv(xi)).epsilon(1e-7));
  }
}

TEST_CASE("singular profile") {
  const Problem pb(testing::subcritical_case());
  const SingularValue s1 = singular_solution_eval(pb, 1.0);
  CHECK(s1.f == Approx(4.062e7).epsilon(1e-3));
  for (double xi : {0.5, 1.0, 2.0, 5.0}) {
    const SingularValue s = singular_solution_eval(pb, xi);
    CHECK(std::abs(s.residual_identity) < 1e-8 * s.term_scale);
    // alpha f + beta xi f' vanishes along the profile.
    const double fp = s.fm_deriv / (pb.m() * std::pow(s.f, pb.m() - 1.0));
    CHECK(std::abs(pb.alpha() * s.f + pb.beta() * xi * fp) < 1e-13 * pb.alpha() * s.f);
  }
  CHECK_THROWS_AS(singular_solution_eval(Problem({3.0, 17.0, 2.5, 3}), 1.0), DomainError);
  CHECK_THROWS_AS(singular_solution_eval(pb, 0.0), DomainError);
}

TEST_CASE("singular profile residual over random tuples") {
  std::mt19937_64 rng(11);
  int tested = 0;
  while (tested < 100) {
    const Problem pb(testing::random_params(rng));
    if (!pb.constants().K_sing || !std::isfinite(*pb.constants().K_sing)) continue;
    ++tested;
    for (int k = 0; k <= 20; ++k) {
      const double xi = std::pow(10.0, -1.0 + 0.1 * k);
      const SingularValue s = singular_solution_eval(pb, xi);
      if (!std::isfinite(s.term_scale)) continue;
      REQUIRE(std::abs(s.residual_identity) < 1e-8 * s.term_scale);
    }
  }
}

TEST_CASE("tail laws") {
  const Problem pb(testing::supercritical_case());
  const TailLaw p1 = p1_tail_law(pb);
  CHECK(p1.kind == TailKind::kP1);
  CHECK(p1.exponent == -2.25);
  CHECK_FALSE(p1.coefficient);
  const TailLaw pg = pgamma_tail_law(pb);
  CHECK(pg.kind == TailKind::kPgamma);
  CHECK(pg.exponent == Approx(-2.5 / 4.0));
  REQUIRE(pg.coefficient);
  CHECK(*pg.coefficient == Approx(std::pow(0.25, 0.25)).epsilon(1e-15));
}
