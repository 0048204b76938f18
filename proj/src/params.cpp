#include "selfsim/params.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

std::string describe(const ProblemParams& params) {
  std::ostringstream os;
  os << "(m=" << params.m << ", p=" << params.p << ", sigma=" << params.sigma
     << ", N=" << params.dim << ")";
  return os.str();
}

double z0_formula(const ProblemParams& params) {
  const double s2 = params.sigma + 2.0;
  const double gap = params.p - params.m;
  const int n = params.dim;
  return s2 * (params.m * (n + params.sigma) - params.p * (n - 2)) / (gap * gap);
}

}  // namespace

void validate(const ProblemParams& params) {
  if (!std::isfinite(params.m) || !std::isfinite(params.p) ||
      !std::isfinite(params.sigma)) {
    throw ParameterError("exponents must be finite " + describe(params));
  }
  if (!(params.m > 1.0)) {
    throw ParameterError("m must exceed 1 " + describe(params));
  }
  if (!(params.p > params.m)) {
    throw ParameterError("p must exceed m " + describe(params));
  }
  if (!(params.sigma >= 0.0)) {
    throw ParameterError("sigma must be non-negative " + describe(params));
  }
  if (params.dim < 1) {
    throw ParameterError("dim must be at least 1 " + describe(params));
  }
}

DerivedConstants derive_constants(const ProblemParams& params) {
  validate(params);
  DerivedConstants c;
  const double s2 = params.sigma + 2.0;
  c.L = params.sigma * (params.m - 1.0) + 2.0 * (params.p - 1.0);
  c.alpha = s2 / c.L;
  c.beta = (params.p - params.m) / c.L;
  c.p_fujita = fujita_exponent(params);
  c.gamma0 = 1.0 / (c.alpha * (params.p - 1.0));
  const double z0 = z0_formula(params);
  if (z0 > 0.0) {
    c.Z0 = z0;
    c.K_sing = std::pow(params.m * z0, 1.0 / (params.p - params.m));
  }
  c.vss_integrable = params.dim * c.beta - c.alpha < 0.0;
  c.subcritical = params.p < c.p_fujita;
  return c;
}

double fujita_exponent(const ProblemParams& params) {
  validate(params);
  return params.m + (params.sigma + 2.0) / params.dim;
}

VssPredicates vss_predicates(const ProblemParams& params) {
  const DerivedConstants c = derive_constants(params);
  VssPredicates out;
  out.vss_integrable = c.vss_integrable;
  out.tail_integrable =
      -(params.sigma + 2.0) / (params.p - params.m) < -static_cast<double>(params.dim);
  return out;
}

double amplitude_of_shoot(const ProblemParams& params, double C) {
  const DerivedConstants c = derive_constants(params);
  if (!(C >= 0.0)) throw ParameterError("shoot parameter C must be non-negative");
  if (C == 0.0) return 0.0;
  return std::pow(C * params.m, 2.0 / c.L) *
         std::pow(c.alpha / params.m, (params.sigma + 2.0) / c.L);
}

double shoot_of_amplitude(const ProblemParams& params, double A) {
  const DerivedConstants c = derive_constants(params);
  if (!(A >= 0.0)) throw ParameterError("amplitude A must be non-negative");
  if (A == 0.0) return 0.0;
  // A^{L/2} (m/alpha)^{(sigma+2)/2} / m
  return std::pow(A, c.L / 2.0) *
         std::pow(params.m / c.alpha, (params.sigma + 2.0) / 2.0) / params.m;
}

Problem::Problem(const ProblemParams& params)
    : params_(params), constants_(derive_constants(params)) {
  kappa_ = (params.p - params.m) / (params.sigma + 2.0);
  tail_exponent_ = (params.sigma + 2.0) / (params.p - params.m);
  z_q3_formal_ = z0_formula(params);
}

void Problem::require_weighted_regime() const {
  if (params_.sigma == 0.0 && !params_.regression_only) {
    throw ParameterError(
        "sigma = 0 is only accepted with the regression-only flag " + describe(params_));
  }
}

}  // namespace selfsim
