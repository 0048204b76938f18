#pragma once

#include <random>

#include "selfsim/params.hpp"

namespace testing {

inline selfsim::ProblemParams supercritical_case() { return {3.0, 5.0, 2.5, 3}; }
inline selfsim::ProblemParams subcritical_case() { return {3.0, 3.4, 2.5, 3}; }
inline selfsim::ProblemParams critical_p() { return {3.0, 4.5, 2.5, 3}; }
inline selfsim::ProblemParams constant_case() { return {2.0, 3.0, 0.0, 2, true}; }

// Random valid tuple with sigma > 0: m in (1, 4), p in (m, m + 4), sigma in
// (0, 4), N in 1..5.
inline selfsim::ProblemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 5);
  selfsim::ProblemParams p;
  p.m = 1.0 + 1e-3 + 3.0 * u(rng);
  p.p = p.m + 1e-3 + 4.0 * u(rng);
  p.sigma = 1e-3 + 4.0 * u(rng);
  p.dim = n(rng);
  return p;
}

}  // namespace testing
