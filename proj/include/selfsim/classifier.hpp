#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfsim/phase.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

enum class ProfileKind {
  kSignChange,
  kCompactSupport,
  kTailP1,
  kTailPgamma,
  kPositiveMin,
  kUnresolved,
};

const char* to_string(ProfileKind k);
// Inverse of to_string; throws ParameterError on unknown names.
ProfileKind profile_kind_from_string(const std::string& s);

struct ClassDiagnostics {
  double xi_end = 0.0;
  double terminal_Y = 0.0;
  double terminal_Z = 0.0;
  std::optional<double> tail_slope_fit;
  std::optional<double> min_location;
  OmegaTag omega_tag = OmegaTag::kBudget;
  std::string note;
};

struct ProfileClass {
  ProfileKind kind = ProfileKind::kUnresolved;
  ClassDiagnostics diagnostics;
};

// Phase-space controls used for a shot: the tolerance and step budget come
// from the profile controls and the log-radius budget from xi_max.
PhaseControls shot_controls(const IntegrationControls& controls);

// State in the infinite chart at the launch radius of amplitude A.
PhaseState2 shot_start(const Problem& pb, double A, const IntegrationControls& controls);

// Integrates the shot of amplitude A in phase space.
PhaseTrajectory shoot(const Problem& pb, double A, const IntegrationControls& controls,
                      const PhaseControls& phase);

ProfileClass classify(const Problem& pb, double A, const IntegrationControls& controls = {});

struct SweepEntry {
  double A = 0.0;
  double C = 0.0;
  ProfileClass result;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  bool ordering_ok = true;
  std::string alarm;  // first out-of-order pair, empty when ordering_ok
};

// Classifies every amplitude of an increasing positive grid. Up to `jobs`
// classifications run at once; entries always come back in grid order.
SweepResult sweep(const Problem& pb, const std::vector<double>& amplitudes,
                  const IntegrationControls& controls = {}, int jobs = 1);

// Checks SIGN_CHANGE* TAIL_P1* TAIL_PGAMMA* POSITIVE_MIN* along the entries,
// skipping UNRESOLVED ones.
bool ordering_consistent(const std::vector<SweepEntry>& entries, std::string* alarm = nullptr);

}  // namespace selfsim
