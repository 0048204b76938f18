#include "selfsim/critical_search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim {

const char* to_string(SearchTarget t) {
  switch (t) {
    case SearchTarget::kAStarLower: return "A_STAR_LOWER";
    case SearchTarget::kAZero: return "A_ZERO";
    case SearchTarget::kAStarUpper: return "A_STAR_UPPER";
  }
  return "?";
}

namespace {

using Predicate = std::function<bool(const ProfileClass&)>;

struct Bisector {
  const Problem& pb;
  const SearchControls& controls;
  Predicate pred;
  SearchResult& res;

  bool probe(double A) {
    HistoryEntry e;
    e.A = A;
    e.result = classify(pb, A, controls.integration);
    e.predicate = pred(e.result);
    res.history.push_back(e);
    return e.predicate;
  }

  // Geometric expansion from A0 until the predicate is false at lo and true
  // at hi. `true_above` says on which side the predicate holds.
  void bracket(double A0, bool true_above) {
    const double f = controls.expansion_factor;
    const bool at0 = probe(A0);
    double a = A0;
    // Walk away from the side that already matches.
    const bool go_up = at0 != true_above;
    for (int k = 0; k < controls.max_expansions; ++k) {
      const double b = go_up ? a * f : a / f;
      const bool pb_ = probe(b);
      if (pb_ != at0) {
        double l = go_up ? a : b, h = go_up ? b : a;
        res.lo = l;
        res.hi = h;
        return;
      }
      a = b;
    }
    std::ostringstream os;
    os << "no bracket for " << to_string(res.target) << " after " << controls.max_expansions
       << " expansions from A=" << A0;
    throw NumericalFailure(os.str(), "last A=" + std::to_string(a));
  }

  // Predicate false at lo and true at hi, or the reverse when !true_above.
  void bisect(bool true_above) {
    while ((res.hi - res.lo) > controls.tol_A * res.hi) {
      if (res.iterations >= controls.max_iterations) {
        res.warnings.push_back("iteration limit reached before the bracket tolerance");
        break;
      }
      const double mid = 0.5 * (res.lo + res.hi);
      if (mid <= res.lo || mid >= res.hi) break;
      const bool v = probe(mid);
      (v == true_above ? res.hi : res.lo) = mid;
      ++res.iterations;
    }
    res.midpoint = 0.5 * (res.lo + res.hi);
  }
};

const HistoryEntry* entry_at(const SearchResult& r, double A) {
  for (auto it = r.history.rbegin(); it != r.history.rend(); ++it)
    if (it->A == A) return &*it;
  return nullptr;
}

}  // namespace

SearchResult find_a_star_upper(const Problem& pb, const SearchControls& controls) {
  pb.require_weighted_regime();
  SearchResult res;
  res.target = SearchTarget::kAStarUpper;
  Bisector b{pb, controls, [](const ProfileClass& c) { return c.kind == ProfileKind::kPositiveMin; },
             res};
  b.bracket(1.0, true);
  const double hi0 = res.hi;
  b.bisect(true);

  if (const auto* e = entry_at(res, res.hi); e && e->result.diagnostics.min_location) {
    res.min_location_hi = e->result.diagnostics.min_location;
    if (const auto* e0 = entry_at(res, hi0); e0 && e0->result.diagnostics.min_location) {
      res.min_location_drift = *res.min_location_hi - *e0->result.diagnostics.min_location;
    }
  }
  if (const auto* e = entry_at(res, res.lo)) res.limit_kind = e->result.kind;
  return res;
}

SearchResult find_a_star_lower(const Problem& pb, const SearchControls& controls) {
  pb.require_weighted_regime();
  if (!pb.constants().subcritical) {
    std::ostringstream os;
    os.precision(17);
    os << "p = " << pb.p() << " >= p_F(sigma) = " << pb.constants().p_fujita
       << ": every profile stays positive, so there is no compactly supported profile";
    throw RegimeError(os.str());
  }
  SearchResult res;
  res.target = SearchTarget::kAStarLower;
  // Predicate "VANISH occurs" holds below A_*.
  Bisector b{pb, controls, [](const ProfileClass& c) { return c.kind == ProfileKind::kSignChange; },
             res};
  b.bracket(1.0, false);
  // bracket() orders by A; the predicate is true at lo here.
  b.bisect(false);

  // Re-run the midpoint and stop in the P2 band.
  PhaseControls pc = shot_controls(controls.integration);
  pc.stop_at_p2 = true;
  const PhaseTrajectory traj = shoot(pb, res.midpoint, controls.integration, pc);
  const double k = pb.kappa();
  double bestY = traj.samples.back().Y;
  for (const auto& s : traj.samples)
    if (std::abs(s.Y + k) < std::abs(bestY + k) && s.X < 1e-4) bestY = s.Y;
  res.p2_band_Y = traj.omega_tag == OmegaTag::kToP2 ? traj.samples.back().Y : bestY;
  res.p2_band_ok =
      traj.omega_tag == OmegaTag::kToP2 && std::abs(*res.p2_band_Y + k) < 0.05 * k;

  // f^{m-1} + beta (m-1) xi^2 / (2m) is constant along the interface law.
  const double m = pb.m(), beta = pb.beta();
  double sum = 0.0;
  int cnt = 0;
  for (const auto& s : traj.samples) {
    if (!(std::abs(s.Y + k) < 0.05 * k) || !(s.x > 0.0)) continue;
    const double xi = std::exp(s.eta1);
    sum += std::exp((m - 1.0) * phase_log_f(pb, s)) + beta * (m - 1.0) * xi * xi / (2.0 * m);
    ++cnt;
  }
  if (cnt > 0) {
    res.interface_C = sum / cnt;
    res.interface_xi0 = std::sqrt(2.0 * m * *res.interface_C / (beta * (m - 1.0)));
  }

  if (res.p2_band_ok) {
    res.limit_kind = ProfileKind::kCompactSupport;
  } else {
    res.warnings.push_back("converged midpoint did not settle in the P2 band; tolerances may be too loose");
    res.limit_kind = classify(pb, res.midpoint, controls.integration).kind;
  }
  return res;
}

SearchResult find_a_zero(const Problem& pb, const SearchControls& controls,
                         const SearchResult* upper) {
  pb.require_weighted_regime();
  SearchResult up_local;
  if (!upper) {
    up_local = find_a_star_upper(pb, controls);
    upper = &up_local;
  }
  const double half_g0 = 0.5 * pb.constants().gamma0;
  SearchResult res;
  res.target = SearchTarget::kAZero;
  res.a_star_upper = upper->midpoint;
  Bisector b{pb, controls,
             [=](const ProfileClass& c) { return c.diagnostics.terminal_Z > half_g0; }, res};

  res.hi = upper->hi;
  if (!b.probe(res.hi)) {
    throw NumericalFailure("A_0 search: terminal Z above A^* does not exceed gamma0/2",
                           "A=" + std::to_string(res.hi));
  }
  double lo = upper->lo;
  if (pb.constants().subcritical) {
    const SearchResult lower = find_a_star_lower(pb, controls);
    lo = std::min(lo, lower.hi);
  }
  for (int k = 0; b.probe(lo); ++k) {
    if (k >= controls.max_expansions) {
      throw NumericalFailure("A_0 search: no amplitude below A^* with Z -> 0",
                             "A=" + std::to_string(lo));
    }
    lo /= controls.expansion_factor;
  }
  res.lo = lo;
  b.bisect(true);

  if (const auto* e = entry_at(res, res.lo)) res.z_lo = e->result.diagnostics.terminal_Z;
  if (const auto* e = entry_at(res, res.hi)) res.z_hi = e->result.diagnostics.terminal_Z;

  // UNRESOLVED probes that sit next to the final bracket widen it.
  std::vector<const HistoryEntry*> sorted;
  for (const auto& e : res.history) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const HistoryEntry* a, const HistoryEntry* b) { return a->A < b->A; });
  double margin = 0.0;
  auto unresolved = [](const HistoryEntry* e) { return e->result.kind == ProfileKind::kUnresolved; };
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i]->A != res.lo) continue;
    for (std::size_t j = i + 1; j-- > 0 && unresolved(sorted[j]);)
      margin = std::max(margin, res.midpoint - sorted[j]->A);
    for (std::size_t j = i + 1; j < sorted.size() && unresolved(sorted[j]); ++j)
      margin = std::max(margin, sorted[j]->A - res.midpoint);
    break;
  }
  res.gap_uncertainty = (res.hi - res.lo) + (upper->hi - upper->lo) + margin;

  // Every probe below A^* read as a P1 tail: report A_0 = A^* with the margin.
  if (res.hi >= upper->hi) {
    res.midpoint = upper->midpoint;
    res.warnings.push_back(
        "no P_gamma0 signature below A^* at this resolution; A_0 reported equal to A^*");
  }
  res.gap = upper->midpoint - res.midpoint;
  if (const auto* e = entry_at(res, res.hi)) res.limit_kind = e->result.kind;
  return res;
}

}  // namespace selfsim
