#include "doctest.h"

#include <cmath>

#include "selfsim/stiff.hpp"

using namespace selfsim::stiff;

namespace {

// Fixed-step run of y' = cos(t) y on [0, 2]; returns the error at t = 2.
double fixed_step_error(int n) {
  Integrator<1>::Rhs rhs = [](double t, const Vec<1>& y) { return Vec<1>{std::cos(t) * y[0]}; };
  Integrator<1>::Jacobian jac = [](double t, const Vec<1>& y, Mat<1>& J, Vec<1>& dt) {
    J[0][0] = std::cos(t);
    dt[0] = -std::sin(t) * y[0];
  };
  Tolerances<1> tol;
  tol.rel_tol = 1e3;
  tol.abs_tol = {1e3};
  Integrator<1> in(rhs, jac, tol);
  const double h = 2.0 / n;
  in.reset(0.0, Vec<1>{1.0}, h);
  in.set_max_step(h);
  DenseStep<1> ds;
  while (in.t() < 2.0 - 1e-12) in.step(2.0, ds);
  return std::abs(in.y()[0] - std::exp(std::sin(2.0)));
}

}  // namespace

TEST_CASE("fourth order on a non-autonomous problem") {
  const double e1 = fixed_step_error(40), e2 = fixed_step_error(80), e3 = fixed_step_error(160);
  CHECK(std::log2(e1 / e2) > 3.5);
  CHECK(std::log2(e2 / e3) > 3.5);
}

TEST_CASE("linear solution of a singular linear equation is reproduced") {
  // y' = -2y/t + 1 has the solution y = t/3.
  Integrator<1>::Rhs rhs = [](double t, const Vec<1>& y) { return Vec<1>{-2.0 * y[0] / t + 1.0}; };
  Integrator<1>::Jacobian jac = [](double t, const Vec<1>& y, Mat<1>& J, Vec<1>& dt) {
    J[0][0] = -2.0 / t;
    dt[0] = 2.0 * y[0] / (t * t);
  };
  Tolerances<1> tol;
  tol.abs_tol = {1e-14};
  Integrator<1> in(rhs, jac, tol);
  in.reset(1e-3, Vec<1>{1e-3 / 3.0}, 1e-5);
  DenseStep<1> ds;
  int steps = 0;
  while (in.t() < 1.0 && steps < 10000) {
    REQUIRE(in.step(1.0, ds) == Integrator<1>::Outcome::kAccepted);
    ++steps;
  }
  CHECK(in.y()[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(steps < 100);
  // Dense output inside the last step.
  const double tm = 0.5 * (ds.t0 + ds.t1());
  CHECK(ds.at(tm)[0] == doctest::Approx(tm / 3.0).epsilon(1e-10));
}

TEST_CASE("root location on dense output") {
  Integrator<1>::Rhs rhs = [](double, const Vec<1>& y) { return Vec<1>{-y[0]}; };
  Integrator<1>::Jacobian jac = [](double, const Vec<1>&, Mat<1>& J, Vec<1>& dt) {
    J[0][0] = -1.0;
    dt[0] = 0.0;
  };
  Tolerances<1> tol;
  tol.abs_tol = {1e-14};
  Integrator<1> in(rhs, jac, tol);
  in.reset(0.0, Vec<1>{1.0}, 1e-2);
  DenseStep<1> ds;
  while (in.y()[0] > 0.5) in.step(10.0, ds);
  const double r = locate_root(ds, ds.t0, ds.t1(), [](const Vec<1>& y) { return y[0] - 0.5; }, 1e-13);
  CHECK(r == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}
