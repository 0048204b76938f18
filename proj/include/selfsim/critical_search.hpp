#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfsim/classifier.hpp"

namespace selfsim {

enum class SearchTarget { kAStarLower, kAZero, kAStarUpper };
const char* to_string(SearchTarget t);

struct SearchControls {
  IntegrationControls integration;
  double tol_A = 1e-10;  // relative bracket width
  int max_expansions = 60;
  double expansion_factor = 4.0;
  int max_iterations = 200;
};

struct HistoryEntry {
  double A = 0.0;
  ProfileClass result;
  bool predicate = false;
};

struct SearchResult {
  SearchTarget target = SearchTarget::kAStarUpper;
  double lo = 0.0, hi = 0.0;
  double midpoint = 0.0;
  int iterations = 0;
  std::vector<HistoryEntry> history;
  // Class assigned to the converged midpoint (COMPACT_SUPPORT for A_* when
  // the P2 band check passes).
  std::optional<ProfileKind> limit_kind;
  std::vector<std::string> warnings;

  // A_STAR_LOWER: P2 band reading and interface fit of the midpoint.
  std::optional<double> p2_band_Y;
  bool p2_band_ok = false;
  std::optional<double> interface_xi0;
  std::optional<double> interface_C;
  // A_ZERO: terminal Z at both bracket ends and the gap to A^*.
  std::optional<double> z_lo, z_hi;
  std::optional<double> a_star_upper;
  std::optional<double> gap;
  std::optional<double> gap_uncertainty;
  // A_STAR_UPPER: minimum location just above A^*.
  std::optional<double> min_location_hi;
  std::optional<double> min_location_drift;
};

// A^*: smallest amplitude whose profile has a positive minimum.
SearchResult find_a_star_upper(const Problem& pb, const SearchControls& controls = {});

// A_*: the compactly supported profile, m < p < p_F only (RegimeError otherwise).
SearchResult find_a_star_lower(const Problem& pb, const SearchControls& controls = {});

// A_0: boundary between P1 tails (Z -> 0) and the P_gamma0 tail, predicate
// Z(xi_max) > gamma0 / 2. Reuses `upper` for A^* when given.
SearchResult find_a_zero(const Problem& pb, const SearchControls& controls = {},
                         const SearchResult* upper = nullptr);

}  // namespace selfsim
