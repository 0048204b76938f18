#include "selfsim/classifier.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "selfsim/asymptotics.hpp"
#include "selfsim/errors.hpp"

namespace selfsim {

const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::kSignChange: return "SIGN_CHANGE";
    case ProfileKind::kCompactSupport: return "COMPACT_SUPPORT";
    case ProfileKind::kTailP1: return "TAIL_P1";
    case ProfileKind::kTailPgamma: return "TAIL_PGAMMA";
    case ProfileKind::kPositiveMin: return "POSITIVE_MIN";
    case ProfileKind::kUnresolved: return "UNRESOLVED";
  }
  return "?";
}

ProfileKind profile_kind_from_string(const std::string& s) {
  for (auto k : {ProfileKind::kSignChange, ProfileKind::kCompactSupport, ProfileKind::kTailP1,
                 ProfileKind::kTailPgamma, ProfileKind::kPositiveMin, ProfileKind::kUnresolved}) {
    if (s == to_string(k)) return k;
  }
  throw ParameterError("unknown profile class '" + s + "'");
}

PhaseControls shot_controls(const IntegrationControls& controls) {
  if (!(controls.xi_max > 0.0)) throw ParameterError("xi_max must be positive");
  PhaseControls pc;
  pc.rel_tol = controls.rel_tol;
  pc.eta1_max = std::log(controls.xi_max);
  pc.max_steps = controls.max_steps;
  pc.stop_at_p2 = false;
  pc.stop_on_tail = false;
  return pc;
}

PhaseState2 shot_start(const Problem& pb, double A, const IntegrationControls& controls) {
  if (!(A > 0.0)) throw ParameterError("amplitude A must be positive");
  const double xi0 = controls.xi_start > 0.0 ? controls.xi_start : default_launch_radius(pb, A);
  const SeriesValue s = origin_eval(pb, A, xi0, SeriesOrder::kFull);
  return profile_to_phase2(pb, {xi0, s.f, s.fm_deriv});
}

PhaseTrajectory shoot(const Problem& pb, double A, const IntegrationControls& controls,
                      const PhaseControls& phase) {
  return integrate_phase(pb, shot_start(pb, A, controls), phase);
}

ProfileClass classify(const Problem& pb, double A, const IntegrationControls& controls) {
  pb.require_weighted_regime();
  const PhaseTrajectory traj = shoot(pb, A, controls, shot_controls(controls));

  ProfileClass out;
  ClassDiagnostics& d = out.diagnostics;
  const PhaseSample& last = traj.samples.back();
  d.xi_end = std::exp(last.eta1);
  d.terminal_Y = last.Y;
  d.terminal_Z = last.Z;
  d.omega_tag = traj.omega_tag;
  if (traj.y_zero_eta1) d.min_location = std::exp(*traj.y_zero_eta1);

  switch (traj.omega_tag) {
    case OmegaTag::kToQ5:
      out.kind = ProfileKind::kSignChange;
      break;
    case OmegaTag::kEnteredR:
      out.kind = ProfileKind::kPositiveMin;
      break;
    case OmegaTag::kToP1: {
      const auto slope = tail_slope(pb, traj);
      const double target = -pb.tail_exponent();
      if (slope && std::abs(*slope - target) <= 0.02 * std::abs(target)) {
        out.kind = ProfileKind::kTailP1;
        d.tail_slope_fit = slope;
      } else {
        d.note = "P1 window held but the tail slope is off the expected law";
      }
      break;
    }
    case OmegaTag::kToPgamma0:
      out.kind = ProfileKind::kTailPgamma;
      d.tail_slope_fit = tail_slope(pb, traj);
      if (!d.tail_slope_fit) {
        out.kind = ProfileKind::kUnresolved;
        d.note = "P_gamma0 window held but no tail slope could be fitted";
      }
      break;
    case OmegaTag::kToP2:
      d.note = "stopped near P2";
      break;
    case OmegaTag::kBudget:
      d.note = traj.budget_reason;
      break;
  }
  return out;
}

namespace {

int rank(ProfileKind k) {
  switch (k) {
    case ProfileKind::kSignChange: return 0;
    case ProfileKind::kCompactSupport: return 1;
    case ProfileKind::kTailP1: return 2;
    case ProfileKind::kTailPgamma: return 3;
    case ProfileKind::kPositiveMin: return 4;
    case ProfileKind::kUnresolved: return -1;
  }
  return -1;
}

}  // namespace

bool ordering_consistent(const std::vector<SweepEntry>& entries, std::string* alarm) {
  const SweepEntry* prev = nullptr;
  for (const auto& e : entries) {
    const int r = rank(e.result.kind);
    if (r < 0) continue;
    if (prev && r < rank(prev->result.kind)) {
      if (alarm) {
        std::ostringstream os;
        os.precision(17);
        os << to_string(e.result.kind) << " at A=" << e.A << " follows "
           << to_string(prev->result.kind) << " at A=" << prev->A;
        *alarm = os.str();
      }
      return false;
    }
    prev = &e;
  }
  return true;
}

SweepResult sweep(const Problem& pb, const std::vector<double>& amplitudes,
                  const IntegrationControls& controls, int jobs) {
  pb.require_weighted_regime();
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0.0)) throw ParameterError("sweep amplitudes must be positive");
    if (i > 0 && !(amplitudes[i] > amplitudes[i - 1])) {
      throw ParameterError("sweep amplitudes must be strictly increasing");
    }
  }
  if (jobs < 1) throw ParameterError("jobs must be at least 1");

  const std::size_t n = amplitudes.size();
  SweepResult res;
  res.entries.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        SweepEntry& e = res.entries[i];
        e.A = amplitudes[i];
        e.C = shoot_of_amplitude(pb.params(), e.A);
        e.result = classify(pb, e.A, controls);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  res.ordering_ok = ordering_consistent(res.entries, &res.alarm);
  return res;
}

}  // namespace selfsim
