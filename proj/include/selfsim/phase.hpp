#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/params.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

using Triple = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

// Finite chart: time eta with d eta1 / d eta = X.
struct PhaseState1 {
  double X = 0.0, Y = 0.0, Z = 0.0;
  double eta1 = 0.0;  // log radius carried along
};

// Chart at X = infinity: time eta1 = ln xi.
struct PhaseState2 {
  double x = 0.0, y = 0.0, z = 0.0;
  double eta1 = 0.0;
};

Triple syst1_rhs(const Problem& pb, const Triple& s);
Triple syst2_rhs(const Problem& pb, const Triple& s);
// Restrictions to the invariant planes x = 0, returning (y', z'), and z = 0,
// returning (x', y').
std::array<double, 2> syst2_rhs_x0(const Problem& pb, double y, double z);
std::array<double, 2> syst2_rhs_z0(const Problem& pb, double x, double y);

Matrix3 syst1_jacobian(const Problem& pb, const Triple& s);
Matrix3 syst2_jacobian(const Problem& pb, const Triple& s);

// (x, y, z) = (1/X, Y/X, Z/X) and back. Throws DomainError on the chart
// boundary.
PhaseState2 chart_map(const PhaseState1& s);
PhaseState1 chart_map(const PhaseState2& s);

struct PhasePair {
  PhaseState1 chart1;
  PhaseState2 chart2;
};
PhasePair profile_to_phase(const Problem& pb, const ProfileState& s);
PhaseState2 profile_to_phase2(const Problem& pb, const ProfileState& s);
ProfileState phase_to_profile(const Problem& pb, const PhaseState2& s);

enum class CriticalId { P1, P2, Pgamma, Q1, Q2, Q3, Q4, Q5, Q6 };
enum class Chart { kFinite, kInfinite, kPoincare };
enum class Stability { kStable, kUnstable, kSaddle, kNonhyperbolic, kNodeAtInfinity };

const char* to_string(CriticalId id);
const char* to_string(Stability s);

struct CriticalPointInfo {
  CriticalId id = CriticalId::P1;
  Chart chart = Chart::kFinite;
  std::optional<double> gamma;  // P_gamma only
  std::optional<Triple> location;
  std::optional<Matrix3> jacobian;
  std::array<std::complex<double>, 3> eigenvalues{};
  // eigenvectors[k] belongs to eigenvalues[k]
  std::array<std::array<std::complex<double>, 3>, 3> eigenvectors{};
  Stability stability = Stability::kNonhyperbolic;
  std::string profile_law;
  std::vector<std::string> notes;
};

std::vector<CriticalPointInfo> critical_catalog(const Problem& pb);
const CriticalPointInfo& find_point(const std::vector<CriticalPointInfo>& catalog, CriticalId id);

// Quadratic approximation W = a X^2 + b X Z + c Z^2 of the centre manifolds
// at P1, with W = X + kappa Y.
struct CenterManifold {
  double a = 0.0, b = 0.0, c = 0.0;
};
CenterManifold p1_center_manifold(const Problem& pb);

// Eigenvector of M(P2) for -(m-1) beta/alpha.
Triple p2_stable_eigenvector(const Problem& pb);

// Starting point on the two-dimensional unstable manifold of Q1. C = +inf
// launches inside the plane x = 0.
PhaseState2 launch_on_unstable_manifold(const Problem& pb, double C, double delta = 1e-4);

enum class OmegaTag { kEnteredR, kToP1, kToPgamma0, kToP2, kToQ5, kBudget };
const char* to_string(OmegaTag t);

struct PhaseControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-200;
  double eta1_max = 13.815510557964274;  // ln 1e6
  long max_steps = 10'000'000;
  // Integration moves to the finite chart once x exceeds x_switch and back
  // when x drops below x_switch / 10.
  double x_switch = 10.0;
  bool stop_at_p2 = true;
  bool stop_on_region = true;
  // When false the P1 and P_gamma0 windows are judged at eta1_max instead
  // of ending the run as soon as they have held for a decade.
  bool stop_on_tail = true;
  std::optional<double> x_stop;
  // Extra samples interpolated at these log radii (increasing order).
  std::vector<double> dense_eta1;
};

struct PhaseSample {
  double eta1 = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double X = 0.0, Y = 0.0, Z = 0.0;
  int chart = 2;
};

struct PhaseTrajectory {
  std::vector<PhaseSample> samples;
  OmegaTag omega_tag = OmegaTag::kBudget;
  std::string budget_reason;
  bool reached_x_stop = false;
  bool q4_anomaly = false;
  // Log radius where y first crossed zero upwards.
  std::optional<double> y_zero_eta1;
  std::vector<PhaseSample> dense;
  long steps = 0;
};

PhaseTrajectory integrate_phase(const Problem& pb, const PhaseState2& start,
                                const PhaseControls& controls = {});

// Least-squares slope of ln f against ln xi over the final decade.
std::optional<double> tail_slope(const Problem& pb, const PhaseTrajectory& traj);
// ln f of a phase sample with finite x.
double phase_log_f(const Problem& pb, const PhaseSample& s);

}  // namespace selfsim
