#include "selfsim/phase.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/stiff.hpp"

namespace selfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dump(const PhaseSample& s) {
  std::ostringstream os;
  os.precision(17);
  os << "eta1=" << s.eta1 << " x=" << s.x << " y=" << s.y << " z=" << s.z << " X=" << s.X
     << " Y=" << s.Y << " Z=" << s.Z << " chart=" << s.chart;
  return os.str();
}

PhaseSample sample_from2(const stiff::Vec<3>& s, double eta1) {
  PhaseSample out;
  out.eta1 = eta1;
  out.x = s[0];
  out.y = s[1];
  out.z = s[2];
  // On the plane x = 0 the finite chart does not exist; Y and Z are left as
  // NaN so that none of the finite-chart monitors fire.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.X = s[0] != 0.0 ? 1.0 / s[0] : kInf;
  out.Y = s[0] != 0.0 ? s[1] / s[0] : nan;
  out.Z = s[0] != 0.0 ? s[2] / s[0] : nan;
  out.chart = 2;
  return out;
}

PhaseSample sample_from1(const stiff::Vec<4>& s) {
  PhaseSample out;
  out.X = s[0];
  out.Y = s[1];
  out.Z = s[2];
  out.eta1 = s[3];
  out.x = 1.0 / s[0];
  out.y = s[1] / s[0];
  out.z = s[2] / s[0];
  out.chart = 1;
  return out;
}

Stability classify_eigen(const std::array<std::complex<double>, 3>& ev) {
  double scale = 0.0;
  for (const auto& e : ev) scale = std::max(scale, std::abs(e));
  const double eps = 1e-12 * std::max(1.0, scale);
  int pos = 0, neg = 0, zero = 0;
  for (const auto& e : ev) {
    if (std::abs(e.real()) <= eps) ++zero;
    else if (e.real() > 0) ++pos;
    else ++neg;
  }
  if (zero > 0) return Stability::kNonhyperbolic;
  if (pos == 3) return Stability::kUnstable;
  if (neg == 3) return Stability::kStable;
  return Stability::kSaddle;
}

void fill_eigen(CriticalPointInfo& info) {
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = (*info.jacobian)[i][j];
  Eigen::EigenSolver<Eigen::Matrix3d> es(M);
  for (int k = 0; k < 3; ++k) {
    info.eigenvalues[k] = es.eigenvalues()(k);
    for (int i = 0; i < 3; ++i) info.eigenvectors[k][i] = es.eigenvectors()(i, k);
  }
  info.stability = classify_eigen(info.eigenvalues);
}

}  // namespace

Triple syst1_rhs(const Problem& pb, const Triple& s) {
  const double X = s[0], Y = s[1], Z = s[2];
  const double k = pb.kappa();
  // Y' written so that P2 = (0, -kappa, 0) is an exact zero.
  return {X * ((pb.m() - 1.0) * Y - 2.0 * X), -Y * (Y + k) + X * (Z - 1.0 - pb.dim() * Y),
          Z * ((pb.p() - 1.0) * Y + pb.sigma() * X)};
}

namespace {

// z - m y^2 - (N-2) y, which vanishes exactly at Q1.
double q1_part(const Problem& pb, double y, double z) {
  return z - pb.m() * y * y - (pb.dim() - 2.0) * y;
}

}  // namespace

Triple syst2_rhs(const Problem& pb, const Triple& s) {
  const double x = s[0], y = s[1], z = s[2];
  const double k = pb.kappa(), y0 = pb.y_q3(), z0 = pb.z_q3_formal();
  const double dy = y - y0;
  // The rounding left by q1_part at (y0, Z0) is cancelled in proportion to
  // z/Z0, so Q1 stays an exact zero and the strongly repelling line
  // {y = y0, z = Z0} stays invariant in floating point.
  const double q3_fix = z0 > 0.0 ? -q1_part(pb, y0, z0) * (z / z0) : 0.0;
  return {x * (2.0 - (pb.m() - 1.0) * y), -k * x * dy + q1_part(pb, y, z) + q3_fix,
          (pb.p() - pb.m()) * z * dy};
}

std::array<double, 2> syst2_rhs_x0(const Problem& pb, double y, double z) {
  const Triple d = syst2_rhs(pb, {0.0, y, z});
  return {d[1], d[2]};
}

std::array<double, 2> syst2_rhs_z0(const Problem& pb, double x, double y) {
  const Triple d = syst2_rhs(pb, {x, y, 0.0});
  return {d[0], d[1]};
}

Matrix3 syst1_jacobian(const Problem& pb, const Triple& s) {
  const double X = s[0], Y = s[1], Z = s[2];
  const double m = pb.m(), p = pb.p(), sg = pb.sigma();
  const int n = pb.dim();
  Matrix3 J{};
  J[0] = {(m - 1.0) * Y - 4.0 * X, (m - 1.0) * X, 0.0};
  J[1] = {Z - 1.0 - n * Y, -2.0 * Y - pb.kappa() - n * X, X};
  J[2] = {sg * Z, (p - 1.0) * Z, (p - 1.0) * Y + sg * X};
  return J;
}

Matrix3 syst2_jacobian(const Problem& pb, const Triple& s) {
  const double x = s[0], y = s[1], z = s[2];
  const double m = pb.m(), k = pb.kappa(), y0 = pb.y_q3();
  const int n = pb.dim();
  Matrix3 J{};
  J[0] = {2.0 - (m - 1.0) * y, -(m - 1.0) * x, 0.0};
  J[1] = {-k * (y - y0), -k * x - 2.0 * m * y - (n - 2.0), 1.0};
  J[2] = {0.0, (pb.p() - m) * z, (pb.p() - m) * (y - y0)};
  return J;
}

PhaseState2 chart_map(const PhaseState1& s) {
  if (!(s.X != 0.0)) throw DomainError("chart map undefined at X = 0");
  return {1.0 / s.X, s.Y / s.X, s.Z / s.X, s.eta1};
}

PhaseState1 chart_map(const PhaseState2& s) {
  if (!(s.x != 0.0)) throw DomainError("chart map undefined at x = 0");
  return {1.0 / s.x, s.y / s.x, s.z / s.x, s.eta1};
}

PhasePair profile_to_phase(const Problem& pb, const ProfileState& s) {
  if (!(s.f > 0.0) || !(s.xi > 0.0)) throw DomainError("phase variables need f > 0 and xi > 0");
  const double m = pb.m(), a = pb.alpha();
  const double xi = s.xi, f = s.f;
  const double fm1 = std::pow(f, m - 1.0);
  const double fp = s.v / (m * fm1);
  PhasePair out;
  out.chart1.X = (m / a) * fm1 / (xi * xi);
  out.chart1.Y = (m / a) * std::pow(f, m - 2.0) * fp / xi;
  out.chart1.Z = std::pow(xi, pb.sigma()) * std::pow(f, pb.p() - 1.0) / a;
  out.chart1.eta1 = std::log(xi);
  out.chart2.x = (a / m) * xi * xi / fm1;
  out.chart2.y = xi * fp / f;
  out.chart2.z = std::pow(xi, pb.sigma() + 2.0) * std::pow(f, pb.p() - m) / m;
  out.chart2.eta1 = out.chart1.eta1;
  return out;
}

PhaseState2 profile_to_phase2(const Problem& pb, const ProfileState& s) {
  return profile_to_phase(pb, s).chart2;
}

ProfileState phase_to_profile(const Problem& pb, const PhaseState2& s) {
  if (!(s.x > 0.0)) throw DomainError("profile needs x > 0");
  const double m = pb.m();
  const double xi = std::exp(s.eta1);
  const double f = std::pow((pb.alpha() / m) * xi * xi / s.x, 1.0 / (m - 1.0));
  return {xi, f, m * std::pow(f, m) * s.y / xi};
}

const char* to_string(CriticalId id) {
  switch (id) {
    case CriticalId::P1: return "P1";
    case CriticalId::P2: return "P2";
    case CriticalId::Pgamma: return "P_gamma0";
    case CriticalId::Q1: return "Q1";
    case CriticalId::Q2: return "Q2";
    case CriticalId::Q3: return "Q3";
    case CriticalId::Q4: return "Q4";
    case CriticalId::Q5: return "Q5";
    case CriticalId::Q6: return "Q6";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kSaddle: return "saddle";
    case Stability::kNonhyperbolic: return "nonhyperbolic";
    case Stability::kNodeAtInfinity: return "node_at_infinity";
  }
  return "?";
}

CenterManifold p1_center_manifold(const Problem& pb) {
  const double gap = pb.p() - pb.m();
  const int n = pb.dim();
  return {(pb.sigma() + 2.0) * (pb.p() * (n - 2) - pb.m() * (n + pb.sigma())) / (gap * gap), 1.0,
          0.0};
}

Triple p2_stable_eigenvector(const Problem& pb) {
  const double a = pb.alpha(), b = pb.beta();
  return {1.0, (a - pb.dim() * b) / (pb.m() * b), 0.0};
}

std::vector<CriticalPointInfo> critical_catalog(const Problem& pb) {
  std::vector<CriticalPointInfo> out;
  auto finite = [&](CriticalId id, Chart chart, Triple loc, std::string law) {
    CriticalPointInfo info;
    info.id = id;
    info.chart = chart;
    info.location = loc;
    info.jacobian =
        chart == Chart::kFinite ? syst1_jacobian(pb, loc) : syst2_jacobian(pb, loc);
    fill_eigen(info);
    info.profile_law = std::move(law);
    return info;
  };
  const int n = pb.dim();
  const double k = pb.kappa();

  auto p1 = finite(CriticalId::P1, Chart::kFinite, {0.0, 0.0, 0.0},
                   "tail f ~ C xi^{-(sigma+2)/(p-m)}, C > 0 free");
  {
    const CenterManifold cm = p1_center_manifold(pb);
    std::ostringstream os;
    os.precision(17);
    os << "centre manifolds W = X + kappa Y = a X^2 + b X Z + c Z^2 with a=" << cm.a
       << " b=" << cm.b << " c=" << cm.c;
    p1.notes.push_back(os.str());
  }
  out.push_back(p1);

  auto p2 = finite(CriticalId::P2, Chart::kFinite, {0.0, -k, 0.0},
                   "interface f ~ [C - beta(m-1) xi^2/(2m)]_+^{1/(m-1)}");
  p2.notes.push_back("unstable manifold contained in the Y axis");
  out.push_back(p2);

  const double g0 = pb.constants().gamma0;
  auto pg = finite(CriticalId::Pgamma, Chart::kFinite, {0.0, 0.0, g0},
                   "tail xi^{sigma/(p-1)} f -> (1/(p-1))^{1/(p-1)}");
  pg.gamma = g0;
  pg.notes.push_back("only gamma = gamma0 is reachable from X > 0");
  out.push_back(pg);

  auto q1 = finite(CriticalId::Q1, Chart::kInfinite, {0.0, 0.0, 0.0},
                   "regular origin f(0) = A, f'(0) = 0");
  if (n == 1) q1.notes.push_back("N = 1: unstable node; shooting stays on the e1-e3 manifold");
  if (n == 2) q1.notes.push_back("N = 2: coincides with Q2 (saddle-node)");
  out.push_back(q1);

  auto q2 = finite(CriticalId::Q2, Chart::kInfinite, {0.0, -(n - 2.0) / pb.m(), 0.0},
                   "singular origin f ~ C xi^{-(N-2)/m}");
  if (n == 1) q2.notes.push_back("N = 1: located at y = 1/m > 0");
  out.push_back(q2);

  if (pb.constants().Z0) {
    out.push_back(finite(CriticalId::Q3, Chart::kInfinite, {0.0, pb.y_q3(), *pb.constants().Z0},
                         "singular origin f ~ C xi^{-(sigma+2)/(p-m)}"));
  }

  auto at_infinity = [&](CriticalId id, Triple loc, Stability st, std::string law) {
    CriticalPointInfo info;
    info.id = id;
    info.chart = Chart::kPoincare;
    info.location = loc;  // (Xbar, Ybar, Zbar) on the equator, W = 0
    info.stability = st;
    info.profile_law = std::move(law);
    return info;
  };
  auto q4 = at_infinity(CriticalId::Q4, {0.0, 0.0, 1.0}, Stability::kNodeAtInfinity,
                        "none: not reached by trajectories from Q1");
  out.push_back(q4);
  out.push_back(at_infinity(CriticalId::Q5, {0.0, -1.0, 0.0}, Stability::kStable,
                            "vanishes at xi0 with (f^m)'(xi0) < 0 (sign change)"));
  out.push_back(at_infinity(CriticalId::Q6, {0.0, 1.0, 0.0}, Stability::kUnstable,
                            "starts at xi0 with f(xi0) = 0, (f^m)'(xi0) > 0"));
  return out;
}

const CriticalPointInfo& find_point(const std::vector<CriticalPointInfo>& catalog, CriticalId id) {
  for (const auto& c : catalog)
    if (c.id == id) return c;
  throw DomainError(std::string("critical point not in catalog: ") + to_string(id));
}

PhaseState2 launch_on_unstable_manifold(const Problem& pb, double C, double delta) {
  if (!(delta > 0.0)) throw ParameterError("launch offset delta must be positive");
  if (!(C >= 0.0)) throw ParameterError("shoot parameter C must be non-negative");
  const int n = pb.dim();
  const double ns = n + pb.sigma();
  PhaseState2 s;
  if (std::isinf(C)) {
    s.x = 0.0;
    s.z = delta;
    s.y = s.z / ns;
    s.eta1 = 0.0;
    return s;
  }
  s.x = delta;
  s.z = C * std::pow(delta, 0.5 * (pb.sigma() + 2.0));
  s.y = -s.x / n + s.z / ns;
  // Log radius from x = (alpha/m) xi^2 A^{1-m}; the C = 0 curve uses A = 1.
  const double A = C > 0.0 ? amplitude_of_shoot(pb.params(), C) : 1.0;
  s.eta1 = 0.5 * std::log(delta * pb.m() * std::pow(A, pb.m() - 1.0) / pb.alpha());
  return s;
}

const char* to_string(OmegaTag t) {
  switch (t) {
    case OmegaTag::kEnteredR: return "ENTERED_R";
    case OmegaTag::kToP1: return "TO_P1";
    case OmegaTag::kToPgamma0: return "TO_PGAMMA0";
    case OmegaTag::kToP2: return "TO_P2";
    case OmegaTag::kToQ5: return "TO_Q5";
    case OmegaTag::kBudget: return "BUDGET";
  }
  return "?";
}

double phase_log_f(const Problem& pb, const PhaseSample& s) {
  const double lx = std::isfinite(s.x) ? std::log(s.x) : -std::log(s.X);
  return (std::log(pb.alpha() / pb.m()) + 2.0 * s.eta1 - lx) / (pb.m() - 1.0);
}

std::optional<double> tail_slope(const Problem& pb, const PhaseTrajectory& traj) {
  if (traj.samples.size() < 3) return std::nullopt;
  const double end = traj.samples.back().eta1;
  const double start = end - std::log(10.0);
  if (traj.samples.front().eta1 > start) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& s : traj.samples) {
    if (s.eta1 < start || !(s.x > 0.0)) continue;
    const double t = s.eta1, lf = phase_log_f(pb, s);
    sx += t;
    sy += lf;
    sxx += t * t;
    sxy += t * lf;
    ++cnt;
  }
  if (cnt < 3) return std::nullopt;
  const double den = cnt * sxx - sx * sx;
  if (!(den > 0.0)) return std::nullopt;
  return (cnt * sxy - sx * sy) / den;
}

PhaseTrajectory integrate_phase(const Problem& pb, const PhaseState2& start,
                                const PhaseControls& controls) {
  if (!(start.x >= 0.0) || !(start.z >= 0.0)) {
    throw ParameterError("phase start must have x >= 0 and z >= 0");
  }
  if (!(controls.rel_tol > 0.0)) throw ParameterError("rel_tol must be positive");
  const double k = pb.kappa();
  const double y_p1 = -pb.tail_exponent();
  const double g0 = pb.constants().gamma0;
  const double ln10 = std::log(10.0);

  using V3 = stiff::Vec<3>;
  using V4 = stiff::Vec<4>;
  stiff::Tolerances<3> tol2;
  tol2.rel_tol = controls.rel_tol;
  tol2.abs_tol = {controls.abs_tol, controls.abs_tol, controls.abs_tol};
  stiff::Integrator<3> chart2(
      [&](double, const V3& s) -> V3 { return syst2_rhs(pb, s); },
      [&](double, const V3& s, stiff::Mat<3>& J, V3& dt) {
        J = syst2_jacobian(pb, s);
        dt = {0.0, 0.0, 0.0};
      },
      tol2, [](const V3& s) { return s[0] >= 0.0 && s[2] >= 0.0; });

  stiff::Tolerances<4> tol1;
  tol1.rel_tol = controls.rel_tol;
  tol1.abs_tol = {controls.abs_tol, controls.abs_tol, controls.abs_tol, controls.rel_tol};
  stiff::Integrator<4> chart1(
      [&](double, const V4& s) -> V4 {
        const Triple d = syst1_rhs(pb, {s[0], s[1], s[2]});
        return {d[0], d[1], d[2], s[0]};
      },
      [&](double, const V4& s, stiff::Mat<4>& J, V4& dt) {
        const Matrix3 j3 = syst1_jacobian(pb, {s[0], s[1], s[2]});
        J = {};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) J[i][j] = j3[i][j];
        J[3][0] = 1.0;
        dt = {0.0, 0.0, 0.0, 0.0};
      },
      tol1, [](const V4& s) { return s[0] > 0.0 && s[2] >= 0.0; });

  PhaseTrajectory traj;
  int chart = 2;
  if (start.x > controls.x_switch) {
    chart = 1;
    chart1.reset(0.0, {1.0 / start.x, start.y / start.x, start.z / start.x, start.eta1}, 1e-3);
  } else {
    chart2.reset(start.eta1, {start.x, start.y, start.z}, 1e-4);
  }
  traj.samples.push_back(sample_from2({start.x, start.y, start.z}, start.eta1));

  double p1_since = std::numeric_limits<double>::quiet_NaN();
  double pg_since = p1_since;
  stiff::DenseStep<3> step2;
  stiff::DenseStep<4> step1;
  const double x_back = controls.x_switch / 10.0;
  std::size_t next_dense = 0;

  // Close to P1 the finite chart needs steps of order 1/X in its own clock and
  // the linear algebra degrades, while the infinite chart keeps (y, z) bounded.
  auto near_p1 = [&](const PhaseSample& s, double slack) {
    return s.X < 1e-12 * slack && std::abs(s.Y) < 1e-6 * slack * k &&
           s.Z < 1e-6 * slack * g0 && std::abs(s.y - y_p1) < slack * std::abs(y_p1) &&
           s.z < 1e3 * slack;
  };

  auto done = [&](OmegaTag tag) {
    traj.omega_tag = tag;
    return traj;
  };

  while (true) {
    if (traj.steps >= controls.max_steps) {
      traj.budget_reason = "step limit";
      return done(OmegaTag::kBudget);
    }
    const PhaseSample before = traj.samples.back();
    PhaseSample after;
    bool accepted;
    if (chart == 2) {
      accepted = chart2.step(controls.eta1_max, step2) == stiff::Integrator<3>::Outcome::kAccepted;
      if (accepted) after = sample_from2(chart2.y(), chart2.t());
    } else {
      accepted = chart1.step(kInf, step1) == stiff::Integrator<4>::Outcome::kAccepted;
      if (accepted) after = sample_from1(chart1.y());
    }
    if (!accepted) {
      traj.budget_reason = "step size collapse at " + dump(before);
      return done(OmegaTag::kBudget);
    }
    ++traj.steps;
    if (!std::isfinite(after.eta1) || std::isnan(after.y)) {
      throw NumericalFailure("non-finite phase state", dump(before));
    }

    // Continuous extension in the active chart, evaluated as a sample.
    auto dense_at = [&](auto&& g) {
      if (chart == 2) {
        const double t = stiff::locate_root(
            step2, step2.t0, step2.t1(),
            [&](const V3& s) { return g(sample_from2(s, 0.0)); }, 1e-14);
        return sample_from2(step2.at(t), t);
      }
      const double t = stiff::locate_root(
          step1, step1.t0, step1.t1(), [&](const V4& s) { return g(sample_from1(s)); }, 1e-14);
      return sample_from1(step1.at(t));
    };

    if (controls.x_stop && after.x >= *controls.x_stop) {
      const double xs = *controls.x_stop;
      traj.samples.push_back(dense_at([&](const PhaseSample& s) {
        return chart == 2 ? s.x - xs : 1.0 / xs - s.X;
      }));
      traj.reached_x_stop = true;
      traj.budget_reason = "x_stop reached";
      return done(OmegaTag::kBudget);
    }

    while (next_dense < controls.dense_eta1.size() &&
           controls.dense_eta1[next_dense] <= after.eta1) {
      const double target = controls.dense_eta1[next_dense++];
      if (target < before.eta1) continue;
      traj.dense.push_back(chart == 2 ? sample_from2(step2.at(target), target)
                                      : dense_at([&](const PhaseSample& s) {
                                          return s.eta1 - target;
                                        }));
    }

    if (before.y <= 0.0 && after.y > 0.0 && !traj.y_zero_eta1) {
      traj.y_zero_eta1 = dense_at([](const PhaseSample& s) { return s.y; }).eta1;
    }
    traj.samples.push_back(after);

    // Y is also large and negative near x = 0 with y < 0, so require it to be falling.
    if (after.Y < -50.0 * k && after.Y < before.Y) return done(OmegaTag::kToQ5);
    if (after.y > 0.0 && after.z > after.x && controls.stop_on_region) {
      return done(OmegaTag::kEnteredR);
    }
    if (controls.stop_at_p2 && std::abs(after.Y + k) < 0.05 * k && after.X < 1e-4 &&
        after.Z < 1e-4) {
      return done(OmegaTag::kToP2);
    }
    if (after.Z > 1e8 && after.y < 0.0) traj.q4_anomaly = true;

    if (std::abs(after.y - y_p1) < 1e-4 && after.x > 1e3) {
      if (std::isnan(p1_since)) p1_since = after.eta1;
      if (controls.stop_on_tail && after.eta1 - p1_since >= ln10) return done(OmegaTag::kToP1);
    } else {
      p1_since = std::numeric_limits<double>::quiet_NaN();
    }
    if (std::abs(after.Z - g0) < 0.02 * g0) {
      if (std::isnan(pg_since)) pg_since = after.eta1;
      if (controls.stop_on_tail && after.eta1 - pg_since >= ln10) {
        return done(OmegaTag::kToPgamma0);
      }
    } else {
      pg_since = std::numeric_limits<double>::quiet_NaN();
    }

    if (after.eta1 >= controls.eta1_max) {
      if (after.eta1 - p1_since >= ln10) return done(OmegaTag::kToP1);
      if (after.eta1 - pg_since >= ln10) return done(OmegaTag::kToPgamma0);
      traj.budget_reason = "reached eta1_max";
      return done(OmegaTag::kBudget);
    }

    if (chart == 2 && after.x > controls.x_switch && !near_p1(after, 10.0)) {
      chart = 1;
      chart1.reset(0.0, {after.X, after.Y, after.Z, after.eta1},
                   std::abs(chart2.h()) * after.x);
    } else if (chart == 1 && (after.x < x_back || near_p1(after, 1.0))) {
      chart = 2;
      // The converted step can fall below the resolution of eta1.
      chart2.reset(after.eta1, {after.x, after.y, after.z},
                   std::max(std::abs(chart1.h()) * after.X, 1e-6));
    }
  }
}

}  // namespace selfsim
