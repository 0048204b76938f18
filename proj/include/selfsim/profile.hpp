#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/params.hpp"

namespace selfsim {

struct ProfileState {
  double xi = 0.0;
  double f = 0.0;
  double v = 0.0;  // (f^m)'
};

struct IntegrationControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double xi_max = 1e6;
  double f_floor = 1e-9;
  long max_steps = 10'000'000;
  // Samples kept per decade of xi; 0 keeps every accepted step.
  int output_per_decade = 0;
  // Launch radius; 0 selects default_launch_radius.
  double xi_start = 0.0;
  bool stop_at_min = true;
  // Extra states interpolated at these radii (increasing order); radii below
  // the launch radius are skipped.
  std::vector<double> dense_xi;
};

enum class ProfileEvent { kVanish, kMinDetected, kReachedXiMax, kStepLimit };

const char* to_string(ProfileEvent e);

struct ProfileTrajectory {
  std::vector<ProfileState> samples;
  ProfileEvent terminal_event = ProfileEvent::kStepLimit;
  double Y_at_end = 0.0;
  double Z_at_end = 0.0;
  std::optional<double> min_location;
  // Set when the vanish point was declared after the step size collapsed
  // against the f^{1-m} singularity before f reached f_floor.
  bool vanish_by_collapse = false;
  std::vector<ProfileState> dense;
  long steps = 0;
};

// Derivative of (f, v) with respect to xi.
std::array<double, 2> profile_rhs(const Problem& pb, const ProfileState& s);

ProfileTrajectory integrate_profile(const Problem& pb, double A,
                                    const IntegrationControls& controls = {});

// Chart-1 quantities of a profile sample.
double profile_Y(const Problem& pb, const ProfileState& s);
double profile_Z(const Problem& pb, const ProfileState& s);

// Largest |residual| / sum|terms| of the profile equation over interior
// samples, with (f^m)'' reconstructed from neighbouring samples.
double residual_audit(const Problem& pb, const std::vector<ProfileState>& samples,
                      int stride = 1);
double residual_audit(const Problem& pb, const ProfileTrajectory& traj, int stride = 1);

// Reconstructed (f^m)'' at sample i (0 < i < n-1) from samples i-1, i, i+1.
double fm_second_derivative(const std::vector<ProfileState>& samples, std::size_t i,
                            double m);

}  // namespace selfsim
