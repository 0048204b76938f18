#include "doctest.h"

#include <cmath>
#include <set>

#include "common.hpp"
#include "selfsim/classifier.hpp"
#include "selfsim/critical_search.hpp"
#include "selfsim/errors.hpp"

using namespace selfsim;

namespace {

// Bisection values at the default controls, rounded outward.
constexpr double kAStarLower34 = 0.500912728712137;
constexpr double kAStarUpper34 = 0.501625243567105;
constexpr double kAStarUpper5 = 0.5553021955;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n > 1 ? double(i) / (n - 1) : 0.0);
  return g;
}

// f at the samples of the last decade, paired with xi.
std::vector<std::pair<double, double>> last_decade(const Problem& pb, const PhaseTrajectory& t) {
  std::vector<std::pair<double, double>> out;
  const double end = t.samples.back().eta1;
  for (const auto& s : t.samples)
    if (s.eta1 >= end - std::log(10.0)) out.emplace_back(std::exp(s.eta1), std::exp(phase_log_f(pb, s)));
  return out;
}

}  // namespace

TEST_CASE("classes at the subcritical reference parameters") {
  const Problem pb(testing::subcritical_case());
  CHECK(classify(pb, 0.1).kind == ProfileKind::kSignChange);
  CHECK(classify(pb, 0.5).kind == ProfileKind::kSignChange);
  CHECK(classify(pb, kAStarLower34 * (1.0 + 1e-4)).kind == ProfileKind::kTailP1);
  CHECK(classify(pb, 0.5012).kind == ProfileKind::kTailP1);
  CHECK(classify(pb, kAStarUpper34 * (1.0 + 1e-4)).kind == ProfileKind::kPositiveMin);
  const ProfileClass big = classify(pb, 10.0);
  CHECK(big.kind == ProfileKind::kPositiveMin);
  REQUIRE(big.diagnostics.min_location);
  CHECK(*big.diagnostics.min_location > 0.0);
  CHECK_FALSE(big.diagnostics.tail_slope_fit);

  const ProfileClass small = classify(pb, 0.1);
  CHECK(small.diagnostics.terminal_Y < -pb.kappa());
  CHECK_FALSE(small.diagnostics.tail_slope_fit);
}

TEST_CASE("no sign change below A^* when p >= p_F") {
  const Problem pb(testing::supercritical_case());
  const auto grid = log_grid(1e-3, kAStarUpper5 * (1.0 - 1e-6), 64);
  const SweepResult s = sweep(pb, grid, {}, 4);
  for (const auto& e : s.entries) CHECK(e.result.kind != ProfileKind::kSignChange);
  CHECK(s.ordering_ok);
}

TEST_CASE("input checks") {
  ProblemParams p = testing::constant_case();
  p.regression_only = false;
  CHECK_THROWS_AS(classify(Problem(p), 0.7), ParameterError);
  CHECK_THROWS_AS(sweep(Problem(p), {0.7}), ParameterError);
  const Problem pb(testing::subcritical_case());
  CHECK_THROWS_AS(classify(pb, 0.0), ParameterError);
  CHECK_THROWS_AS(classify(pb, -1.0), ParameterError);
  CHECK_THROWS_AS(sweep(pb, {0.1, 0.1}), ParameterError);
  CHECK_THROWS_AS(sweep(pb, {0.2, 0.1}), ParameterError);
  CHECK_THROWS_AS(sweep(pb, {0.0, 0.1}), ParameterError);
  CHECK_THROWS_AS(sweep(pb, {0.1}, {}, 0), ParameterError);
  CHECK(profile_kind_from_string("TAIL_PGAMMA") == ProfileKind::kTailPgamma);
  for (auto k : {ProfileKind::kSignChange, ProfileKind::kCompactSupport, ProfileKind::kTailP1,
                 ProfileKind::kTailPgamma, ProfileKind::kPositiveMin, ProfileKind::kUnresolved})
    CHECK(profile_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(profile_kind_from_string("POSITIVE"), ParameterError);
}

TEST_CASE("sweep over the subcritical range") {
  const Problem pb(testing::subcritical_case());
  const SweepResult s = sweep(pb, log_grid(1e-3, 1e3, 128), {}, 4);
  std::set<ProfileKind> seen;
  for (const auto& e : s.entries) {
    seen.insert(e.result.kind);
    CHECK(e.result.kind != ProfileKind::kCompactSupport);
    CHECK(e.C == doctest::Approx(shoot_of_amplitude(pb.params(), e.A)).epsilon(1e-15));
  }
  CHECK(seen.count(ProfileKind::kSignChange));
  CHECK(seen.count(ProfileKind::kPositiveMin));
  CHECK(s.ordering_ok);
  CHECK(s.alarm.empty());
}

TEST_CASE("sweep over the supercritical range") {
  const SweepResult s = sweep(Problem(testing::supercritical_case()), log_grid(1e-3, 1e3, 128), {}, 4);
  for (const auto& e : s.entries) CHECK(e.result.kind != ProfileKind::kSignChange);
  CHECK(s.ordering_ok);
}

TEST_CASE("single-point sweep") {
  const Problem pb(testing::subcritical_case());
  const SweepResult s = sweep(pb, {0.3});
  REQUIRE(s.entries.size() == 1);
  const ProfileClass c = classify(pb, 0.3);
  CHECK(s.entries[0].result.kind == c.kind);
  CHECK(s.entries[0].result.diagnostics.xi_end == c.diagnostics.xi_end);
  CHECK(s.entries[0].result.diagnostics.terminal_Y == c.diagnostics.terminal_Y);
  CHECK(s.entries[0].result.diagnostics.terminal_Z == c.diagnostics.terminal_Z);
  CHECK(sweep(pb, {}).entries.empty());
}

TEST_CASE("ordering check") {
  auto entry = [](double A, ProfileKind k) {
    SweepEntry e;
    e.A = A;
    e.result.kind = k;
    return e;
  };
  using K = ProfileKind;
  CHECK(ordering_consistent({entry(1, K::kSignChange), entry(2, K::kUnresolved), entry(3, K::kTailP1),
                             entry(4, K::kTailPgamma), entry(5, K::kPositiveMin)}));
  CHECK(ordering_consistent({entry(1, K::kPositiveMin), entry(2, K::kUnresolved)}));
  std::string alarm;
  CHECK_FALSE(ordering_consistent(
      {entry(1, K::kTailP1), entry(2, K::kUnresolved), entry(3, K::kSignChange)}, &alarm));
  CHECK(alarm.find("SIGN_CHANGE at A=3 follows TAIL_P1 at A=1") != std::string::npos);
}

TEST_CASE("P1 tails follow the decay law") {
  for (const auto& par : {testing::supercritical_case(), testing::subcritical_case()}) {
    const Problem pb(par);
    const double e = pb.tail_exponent();
    int tails = 0;
    // The P1 window at p = 3.4 is narrow, so it gets its own points.
    auto amps = log_grid(1e-3, 0.55, 12);
    amps.insert(amps.end(), {0.501, 0.5012, 0.5015});
    for (double A : amps) {
      IntegrationControls ic;
      const ProfileClass c = classify(pb, A, ic);
      if (c.kind != ProfileKind::kTailP1) continue;
      ++tails;
      REQUIRE(c.diagnostics.tail_slope_fit);
      CHECK(std::abs(*c.diagnostics.tail_slope_fit + e) <= 0.02 * e);
      double lo = INFINITY, hi = 0.0;
      for (const auto& [xi, f] : last_decade(pb, shoot(pb, A, ic, shot_controls(ic)))) {
        const double coeff = f * std::pow(xi, e);
        REQUIRE(std::isfinite(coeff));
        REQUIRE(coeff > 0.0);
        lo = std::min(lo, coeff);
        hi = std::max(hi, coeff);
      }
      CHECK(hi / lo - 1.0 < 0.02);
    }
    CHECK(tails > 0);
  }
}

TEST_CASE("P_gamma0 tail just below A^*") {
  const Problem pb(testing::supercritical_case());
  SearchControls sc;
  sc.tol_A = 1e-14;
  const SearchResult up = find_a_star_upper(pb, sc);
  IntegrationControls ic;
  ic.xi_max = 100.0;
  const ProfileClass c = classify(pb, up.lo, ic);
  REQUIRE(c.kind == ProfileKind::kTailPgamma);
  CHECK(c.diagnostics.tail_slope_fit);
  const double want = std::pow(1.0 / (pb.p() - 1.0), 1.0 / (pb.p() - 1.0));
  const PhaseTrajectory t = shoot(pb, up.lo, ic, shot_controls(ic));
  const auto& s = t.samples.back();
  const double got = std::exp(pb.sigma() / (pb.p() - 1.0) * s.eta1 + phase_log_f(pb, s));
  MESSAGE("xi^(sigma/(p-1)) f at xi_max: ", got, " against ", want);
  CHECK(std::abs(got - want) / want < 0.01);
}

TEST_CASE("halving rel_tol leaves the classes unchanged") {
  const Problem pb(testing::subcritical_case());
  IntegrationControls a, b;
  b.rel_tol = a.rel_tol / 2.0;
  for (double A : log_grid(1e-2, 1e2, 33)) {
    CAPTURE(A);
    CHECK(classify(pb, A, a).kind == classify(pb, A, b).kind);
  }
  for (double A : {0.5005, 0.5012, 0.502}) {
    CAPTURE(A);
    CHECK(classify(pb, A, a).kind == classify(pb, A, b).kind);
  }
}

TEST_CASE("sweep output does not depend on the job count") {
  const Problem pb(testing::subcritical_case());
  const auto grid = log_grid(0.05, 5.0, 40);
  const SweepResult one = sweep(pb, grid, {}, 1);
  const SweepResult many = sweep(pb, grid, {}, 8);
  REQUIRE(one.entries.size() == many.entries.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(one.entries[i].A == grid[i]);
    CHECK(many.entries[i].A == grid[i]);
    CHECK(one.entries[i].result.kind == many.entries[i].result.kind);
    CHECK(one.entries[i].result.diagnostics.xi_end == many.entries[i].result.diagnostics.xi_end);
    CHECK(one.entries[i].result.diagnostics.terminal_Z ==
          many.entries[i].result.diagnostics.terminal_Z);
  }
}
