#pragma once

// Linearly implicit Rosenbrock method of order 4 (Shampine's coefficient set,
// the one shipped with odeint) with an embedded order-3 error estimate and a
// cubic continuous extension. Both the profile equation and the phase-space
// systems turn stiff along decaying tails, where the drift term relaxes the
// solution onto a slow manifold at a rate that grows without bound. The
// step loop rejects trial states outside the domain of the right-hand side.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace selfsim::stiff {

template <std::size_t D>
using Vec = std::array<double, D>;

template <std::size_t D>
using Mat = std::array<std::array<double, D>, D>;

// One accepted step. Inside [t0, t0+h] the solution is
//   y(s) = y0 (1-s) + s y1 + s (1-s) (c3 + s c4),  s = (t - t0)/h.
template <std::size_t D>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec<D> y0{};
  Vec<D> y1{};
  Vec<D> c3{};
  Vec<D> c4{};

  double t1() const { return t0 + h; }

  Vec<D> at(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec<D> out;
    for (std::size_t i = 0; i < D; ++i)
      out[i] = y0[i] * s1 + s * (y1[i] + s1 * (c3[i] + s * c4[i]));
    return out;
  }
};

// Bisection for a sign change of g along the continuous extension.
template <std::size_t D, typename G>
double locate_root(const DenseStep<D>& step, double a, double b, G&& g, double rel_width) {
  double ga = g(step.at(a));
  for (int it = 0; it < 200; ++it) {
    if (std::abs(b - a) <= rel_width * std::max({std::abs(a), std::abs(b), 1e-300})) break;
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double gm = g(step.at(mid));
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

template <std::size_t D>
struct Tolerances {
  double rel_tol = 1e-10;
  Vec<D> abs_tol{};
};

template <std::size_t D>
class Integrator {
 public:
  using State = Vec<D>;
  using Rhs = std::function<State(double, const State&)>;
  // Jacobian with respect to the state and the explicit time derivative.
  using Jacobian = std::function<void(double, const State&, Mat<D>&, State&)>;
  using Admissible = std::function<bool(const State&)>;

  enum class Outcome { kAccepted, kStepTooSmall };

  Integrator(Rhs rhs, Jacobian jac, Tolerances<D> tol, Admissible admissible = nullptr)
      : rhs_(std::move(rhs)), jac_(std::move(jac)), tol_(tol), admissible_(std::move(admissible)) {}

  void reset(double t, const State& y, double h) {
    t_ = t;
    y_ = y;
    h_ = h;
  }

  double t() const { return t_; }
  const State& y() const { return y_; }
  double h() const { return h_; }
  void set_max_step(double h_max) { h_max_ = h_max; }

  // Advances by one accepted step without passing t_stop.
  Outcome step(double t_stop, DenseStep<D>& out) {
    double h = std::min(std::abs(h_), std::abs(t_stop - t_));
    if (h_max_ > 0.0) h = std::min(h, h_max_);
    if (t_stop < t_) h = -h;
    const double h_min =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));

    // The Jacobian is frozen over all attempts of this step.
    Mat<D> jm{};
    State dfdt{};
    jac_(t_, y_, jm, dfdt);
    EMat J;
    EVec dt, y0 = to_eigen(y_);
    for (std::size_t i = 0; i < D; ++i) {
      dt[i] = dfdt[i];
      for (std::size_t j = 0; j < D; ++j) J(i, j) = jm[i][j];
    }
    const EVec f0 = to_eigen(rhs_(t_, y_));

    bool rejected = false;
    for (int attempt = 0; attempt < 200; ++attempt) {
      if (std::abs(h) < h_min) return Outcome::kStepTooSmall;
      Trial tr;
      const bool ok = attempt_step(h, J, dt, y0, f0, tr);
      double err = 0.0;
      if (ok) {
        for (std::size_t i = 0; i < D; ++i) {
          const double e = std::abs(tr.err[i]);
          if (e == 0.0) continue;
          const double sc =
              tol_.abs_tol[i] + tol_.rel_tol * std::max(std::abs(y_[i]), std::abs(tr.y1[i]));
          err = std::max(err, sc > 0.0 ? e / sc : std::numeric_limits<double>::infinity());
        }
      }
      if (!ok || !std::isfinite(err)) {
        h *= 0.25;
        rejected = true;
        continue;
      }
      if (err <= 1.0) {
        out.t0 = t_;
        out.h = h;
        out.y0 = y_;
        for (std::size_t i = 0; i < D; ++i) {
          out.y1[i] = tr.y1[i];
          out.c3[i] = tr.c3[i];
          out.c4[i] = tr.c4[i];
        }
        double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.25);
        fac = std::clamp(fac, 0.2, rejected ? 1.0 : 5.0);
        t_ += h;
        y_ = out.y1;
        h_ = h * fac;
        return Outcome::kAccepted;
      }
      h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
      rejected = true;
    }
    return Outcome::kStepTooSmall;
  }

 private:
  using EVec = Eigen::Matrix<double, static_cast<int>(D), 1>;
  using EMat = Eigen::Matrix<double, static_cast<int>(D), static_cast<int>(D)>;

  struct Trial {
    EVec y1, err, c3, c4;
  };

  static EVec to_eigen(const State& s) {
    EVec v;
    for (std::size_t i = 0; i < D; ++i) v[i] = s[i];
    return v;
  }
  static State to_array(const EVec& v) {
    State s;
    for (std::size_t i = 0; i < D; ++i) s[i] = v[i];
    return s;
  }

  bool usable(const EVec& v) const {
    for (std::size_t i = 0; i < D; ++i)
      if (!std::isfinite(v[i])) return false;
    return !admissible_ || admissible_(to_array(v));
  }

  EVec eval(double t, const EVec& v) const { return to_eigen(rhs_(t, to_array(v))); }

  bool attempt_step(double h, const EMat& J, const EVec& dt, const EVec& y0, const EVec& f0,
                    Trial& tr) const {
    const EMat A = EMat::Identity() / (gamma * h) - J;
    const Eigen::PartialPivLU<EMat> lu(A);
    EVec g1 = lu.solve(EVec(f0 + h * d1 * dt));
    EVec yt = y0 + a21 * g1;
    if (!usable(yt)) return false;
    EVec g2 = lu.solve(EVec(eval(t_ + c2 * h, yt) + h * d2 * dt + c21 * g1 / h));
    yt = y0 + a31 * g1 + a32 * g2;
    if (!usable(yt)) return false;
    EVec g3 = lu.solve(EVec(eval(t_ + c3 * h, yt) + h * d3 * dt + (c31 * g1 + c32 * g2) / h));
    yt = y0 + a41 * g1 + a42 * g2 + a43 * g3;
    if (!usable(yt)) return false;
    EVec g4 = lu.solve(
        EVec(eval(t_ + c4 * h, yt) + h * d4 * dt + (c41 * g1 + c42 * g2 + c43 * g3) / h));
    yt = y0 + a51 * g1 + a52 * g2 + a53 * g3 + a54 * g4;
    if (!usable(yt)) return false;
    EVec g5 = lu.solve(
        EVec(eval(t_ + h, yt) + (c51 * g1 + c52 * g2 + c53 * g3 + c54 * g4) / h));
    yt += g5;
    if (!usable(yt)) return false;
    tr.err = lu.solve(EVec(eval(t_ + h, yt) +
                           (c61 * g1 + c62 * g2 + c63 * g3 + c64 * g4 + c65 * g5) / h));
    tr.y1 = yt + tr.err;
    if (!usable(tr.y1)) return false;
    for (std::size_t i = 0; i < D; ++i)
      if (!std::isfinite(tr.err[i])) return false;
    tr.c3 = d21 * g1 + d22 * g2 + d23 * g3 + d24 * g4 + d25 * g5;
    tr.c4 = d31 * g1 + d32 * g2 + d33 * g3 + d34 * g4 + d35 * g5;
    return true;
  }

  static constexpr double gamma = 0.25;
  // d4 is negative in the original table. With the positive sign copied in some
  // ports the method drops to first order whenever the rhs depends on t.
  static constexpr double d1 = 0.25, d2 = -0.1043, d3 = 0.1035, d4 = -0.3620000000000023e-01;
  static constexpr double c2 = 0.386, c3 = 0.21, c4 = 0.63;
  static constexpr double c21 = -0.5668800000000000e+01, a21 = 0.1544000000000000e+01;
  static constexpr double c31 = -0.2430093356833875e+01, c32 = -0.2063599157091915e+00;
  static constexpr double a31 = 0.9466785280815826e+00, a32 = 0.2557011698983284e+00;
  static constexpr double c41 = -0.1073529058151375e+00, c42 = -0.9594562251023355e+01,
                          c43 = -0.2047028614809616e+02;
  static constexpr double a41 = 0.3314825187068521e+01, a42 = 0.2896124015972201e+01,
                          a43 = 0.9986419139977817e+00;
  static constexpr double c51 = 0.7496443313967647e+01, c52 = -0.1024680431464352e+02,
                          c53 = -0.3399990352819905e+02, c54 = 0.1170890893206160e+02;
  static constexpr double a51 = 0.1221224509226641e+01, a52 = 0.6019134481288629e+01,
                          a53 = 0.1253708332932087e+02, a54 = -0.6878860361058950e+00;
  static constexpr double c61 = 0.8083246795921522e+01, c62 = -0.7981132988064893e+01,
                          c63 = -0.3152159432874371e+02, c64 = 0.1631930543123136e+02,
                          c65 = -0.6058818238834054e+01;
  static constexpr double d21 = 0.1012623508344586e+02, d22 = -0.7487995877610167e+01,
                          d23 = -0.3480091861555747e+02, d24 = -0.7992771707568823e+01,
                          d25 = 0.1025137723295662e+01;
  static constexpr double d31 = -0.6762803392801253e+00, d32 = 0.6087714651680015e+01,
                          d33 = 0.1643084320892478e+02, d34 = 0.2476722511418386e+02,
                          d35 = -0.6594389125716872e+01;

  Rhs rhs_;
  Jacobian jac_;
  Tolerances<D> tol_;
  Admissible admissible_;
  double t_ = 0.0;
  double h_ = 0.0;
  double h_max_ = 0.0;
  State y_{};
};

}  // namespace selfsim::stiff
