#include "selfsim/profile.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/asymptotics.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/stiff.hpp"

namespace selfsim {

const char* to_string(ProfileEvent e) {
  switch (e) {
    case ProfileEvent::kVanish: return "VANISH";
    case ProfileEvent::kMinDetected: return "MIN_DETECTED";
    case ProfileEvent::kReachedXiMax: return "REACHED_XI_MAX";
    case ProfileEvent::kStepLimit: return "STEP_LIMIT";
  }
  return "?";
}

namespace {

std::string dump(const ProfileState& s) {
  std::ostringstream os;
  os.precision(17);
  os << "xi=" << s.xi << " f=" << s.f << " v=" << s.v;
  return os.str();
}

}  // namespace

std::array<double, 2> profile_rhs(const Problem& pb, const ProfileState& s) {
  if (!(s.f > 0.0) || !(s.xi > 0.0)) {
    throw DomainError("profile equation needs f > 0 and xi > 0 (" + dump(s) + ")");
  }
  const double m = pb.m();
  const double f1m = std::pow(s.f, 1.0 - m);
  const double fp = s.v * f1m / m;
  const double dv = -(pb.dim() - 1) * s.v / s.xi - pb.alpha() * s.f -
                    pb.beta() * s.xi * fp + std::pow(s.xi, pb.sigma()) * std::pow(s.f, pb.p());
  return {fp, dv};
}

double profile_Y(const Problem& pb, const ProfileState& s) {
  return s.v / (pb.alpha() * s.xi * s.f);
}

double profile_Z(const Problem& pb, const ProfileState& s) {
  return std::pow(s.xi, pb.sigma()) * std::pow(s.f, pb.p() - 1.0) / pb.alpha();
}

ProfileTrajectory integrate_profile(const Problem& pb, double A,
                                    const IntegrationControls& controls) {
  if (!(A > 0.0)) throw ParameterError("amplitude A must be positive");
  if (!(controls.rel_tol > 0.0) || !(controls.abs_tol > 0.0)) {
    throw ParameterError("tolerances must be positive");
  }
  const double m = pb.m(), p = pb.p(), sigma = pb.sigma();
  const double alpha = pb.alpha(), beta = pb.beta();
  const int n = pb.dim();

  using Vec2 = stiff::Vec<2>;
  auto rhs = [&](double xi, const Vec2& y) -> Vec2 {
    const auto d = profile_rhs(pb, {xi, y[0], y[1]});
    return {d[0], d[1]};
  };
  auto jac = [&](double xi, const Vec2& y, stiff::Mat<2>& J, Vec2& dt) {
    const double f = y[0], v = y[1];
    const double f1m = std::pow(f, 1.0 - m);
    const double fmm = f1m / f;
    const double xs = std::pow(xi, sigma);
    J[0][0] = (1.0 - m) * v * fmm / m;
    J[0][1] = f1m / m;
    J[1][0] = -alpha - beta * xi * v * (1.0 - m) * fmm / m + p * xs * std::pow(f, p - 1.0);
    J[1][1] = -(n - 1) / xi - beta * xi * f1m / m;
    dt[0] = 0.0;
    dt[1] = (n - 1) * v / (xi * xi) - beta * v * f1m / m +
            (sigma == 0.0 ? 0.0 : sigma * xs / xi * std::pow(f, p));
  };
  auto admissible = [](const Vec2& y) { return y[0] > 0.0; };

  stiff::Tolerances<2> tol;
  tol.rel_tol = controls.rel_tol;
  tol.abs_tol = {controls.abs_tol, controls.abs_tol};
  stiff::Integrator<2> integ(rhs, jac, tol, admissible);

  const double xi0 = controls.xi_start > 0.0 ? controls.xi_start : default_launch_radius(pb, A);
  const SeriesValue s0 = origin_eval(pb, A, xi0, SeriesOrder::kFull);
  integ.reset(xi0, {s0.f, s0.fm_deriv}, 1e-2 * xi0);

  ProfileTrajectory traj;
  traj.samples.push_back({xi0, s0.f, s0.fm_deriv});
  const double per_decade = controls.output_per_decade;
  double next_keep = per_decade > 0 ? std::floor(per_decade * std::log10(xi0)) + 1.0 : 0.0;
  auto keep = [&](const ProfileState& st, bool force) {
    if (per_decade <= 0 || force) {
      traj.samples.push_back(st);
      return;
    }
    const double level = per_decade * std::log10(st.xi);
    if (level >= next_keep) {
      traj.samples.push_back(st);
      next_keep = std::floor(level) + 1.0;
    }
  };
  auto finish = [&](ProfileEvent e) {
    traj.terminal_event = e;
    const ProfileState& last = traj.samples.back();
    traj.Y_at_end = profile_Y(pb, last);
    traj.Z_at_end = profile_Z(pb, last);
    return traj;
  };

  std::size_t next_dense = 0;
  while (next_dense < controls.dense_xi.size() && controls.dense_xi[next_dense] < xi0) ++next_dense;
  auto emit_dense = [&](const stiff::DenseStep<2>& st, double upto) {
    for (; next_dense < controls.dense_xi.size() && controls.dense_xi[next_dense] <= upto;
         ++next_dense) {
      const double x = controls.dense_xi[next_dense];
      const Vec2 y = st.at(x);
      traj.dense.push_back({x, y[0], y[1]});
    }
  };

  int decreasing_steps = 0;
  stiff::DenseStep<2> step;
  while (true) {
    if (traj.steps >= controls.max_steps) {
      keep({integ.t(), integ.y()[0], integ.y()[1]}, true);
      return finish(ProfileEvent::kStepLimit);
    }
    const ProfileState before{integ.t(), integ.y()[0], integ.y()[1]};
    const auto outcome = integ.step(controls.xi_max, step);
    if (outcome != stiff::Integrator<2>::Outcome::kAccepted) {
      // The f^{1-m} factor makes a transversal vanish point unreachable in
      // double precision; once f has collapsed with (f^m)' < 0 call it.
      if (before.v < 0.0 && before.f < 1e-3 * A) {
        if (traj.samples.back().xi != before.xi) traj.samples.push_back(before);
        traj.vanish_by_collapse = true;
        return finish(ProfileEvent::kVanish);
      }
      throw NumericalFailure("profile integration stalled", dump(before));
    }
    ++traj.steps;
    const ProfileState after{integ.t(), integ.y()[0], integ.y()[1]};
    if (!std::isfinite(after.f) || !std::isfinite(after.v)) {
      throw NumericalFailure("non-finite profile state", dump(before));
    }

    if (after.f <= controls.f_floor) {
      const double xv = stiff::locate_root(
          step, step.t0, step.t1(), [&](const Vec2& y) { return y[0] - controls.f_floor; },
          controls.rel_tol);
      const Vec2 y = step.at(xv);
      emit_dense(step, xv);
      keep({xv, y[0], y[1]}, true);
      return finish(ProfileEvent::kVanish);
    }

    if (before.v < 0.0 && after.v >= 0.0 && decreasing_steps >= 10) {
      const double xm = stiff::locate_root(
          step, step.t0, step.t1(), [](const Vec2& y) { return y[1]; }, controls.rel_tol);
      traj.min_location = xm;
      if (controls.stop_at_min) {
        const Vec2 y = step.at(xm);
        emit_dense(step, xm);
        keep({xm, y[0], y[1]}, true);
        return finish(ProfileEvent::kMinDetected);
      }
    }
    decreasing_steps = after.v < 0.0 ? decreasing_steps + 1 : 0;
    emit_dense(step, after.xi);

    const bool at_end = after.xi >= controls.xi_max;
    keep(after, at_end);
    if (at_end) return finish(ProfileEvent::kReachedXiMax);
  }
}

double fm_second_derivative(const std::vector<ProfileState>& s, std::size_t i, double m) {
  // With w = xi (f^m)' / f^m and t = ln xi,  xi^2 (f^m)'' / f^m = w' + w^2 - w.
  // Differencing w in t is exact on power laws, which the tails approach.
  auto w = [&](std::size_t k) { return s[k].xi * s[k].v / std::pow(s[k].f, m); };
  const double t0 = std::log(s[i - 1].xi), t1 = std::log(s[i].xi), t2 = std::log(s[i + 1].xi);
  const double h1 = t1 - t0, h2 = t2 - t1;
  const double w0 = w(i - 1), w1 = w(i), w2 = w(i + 1);
  const double dw = -h2 / (h1 * (h1 + h2)) * w0 + (h2 - h1) / (h1 * h2) * w1 +
                    h1 / (h2 * (h1 + h2)) * w2;
  const double F = std::pow(s[i].f, m);
  return F / (s[i].xi * s[i].xi) * (dw + w1 * w1 - w1);
}

double residual_audit(const Problem& pb, const std::vector<ProfileState>& samples, int stride) {
  if (samples.size() < 3) throw InsufficientSamplesError("residual audit needs at least 3 samples");
  if (stride < 1) throw ParameterError("audit stride must be positive");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < samples.size(); i += stride) {
    const ProfileState& c = samples[i];
    if (!(c.f > 0.0) || !(c.xi > 0.0)) continue;
    const double fpp = fm_second_derivative(samples, i, pb.m());
    worst = std::max(worst, ssode_terms(pb, c.xi, c.f, c.v, fpp).relative_residual());
  }
  return worst;
}

double residual_audit(const Problem& pb, const ProfileTrajectory& traj, int stride) {
  return residual_audit(pb, traj.samples, stride);
}

}  // namespace selfsim
