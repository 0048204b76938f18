#pragma once

#include <optional>

namespace selfsim {

// Exponents of  u_t = Lap(u^m) - |x|^sigma u^p  in dimension N.
struct ProblemParams {
  double m = 0.0;
  double p = 0.0;
  double sigma = 0.0;
  int dim = 0;
  // sigma == 0 is only meaningful as a regression oracle (constant solution);
  // regime classification refuses it unless this is set.
  bool regression_only = false;
};

struct DerivedConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double L = 0.0;
  double p_fujita = 0.0;
  double gamma0 = 0.0;
  // Exist only when N <= 2 or p < m(N+sigma)/(N-2).
  std::optional<double> Z0;
  std::optional<double> K_sing;
  bool vss_integrable = false;  // N*beta - alpha < 0
  bool subcritical = false;     // p < p_F(sigma)
};

struct VssPredicates {
  bool vss_integrable = false;
  bool tail_integrable = false;
};

// Throws ParameterError naming the first violated bound.
void validate(const ProblemParams& params);

DerivedConstants derive_constants(const ProblemParams& params);
double fujita_exponent(const ProblemParams& params);
VssPredicates vss_predicates(const ProblemParams& params);

// Bijection between the shooting parameter C of the Q1 unstable manifold and
// the amplitude A = f(0).
double amplitude_of_shoot(const ProblemParams& params, double C);
double shoot_of_amplitude(const ProblemParams& params, double A);

// Validated parameters together with their derived constants. Everything
// downstream takes one of these by const reference.
class Problem {
 public:
  explicit Problem(const ProblemParams& params);

  const ProblemParams& params() const noexcept { return params_; }
  const DerivedConstants& constants() const noexcept { return constants_; }

  double m() const noexcept { return params_.m; }
  double p() const noexcept { return params_.p; }
  double sigma() const noexcept { return params_.sigma; }
  int dim() const noexcept { return params_.dim; }
  double alpha() const noexcept { return constants_.alpha; }
  double beta() const noexcept { return constants_.beta; }

  // beta/alpha = (p-m)/(sigma+2); P2 sits at Y = -kappa.
  double kappa() const noexcept { return kappa_; }
  // (sigma+2)/(p-m) = alpha/beta; the P1 tail exponent and -y at Q3.
  double tail_exponent() const noexcept { return tail_exponent_; }
  // -(sigma+2)/(p-m), the y coordinate of Q3 and of the singular profile.
  double y_q3() const noexcept { return -tail_exponent_; }
  // m*y^2 + (N-2)*y at y = y_q3. Equals Z0 whenever Z0 exists; kept for all
  // parameters because the factored phase-space right-hand side uses it.
  double z_q3_formal() const noexcept { return z_q3_formal_; }

  // Refuses sigma == 0 unless the regression flag is set.
  void require_weighted_regime() const;

 private:
  ProblemParams params_;
  DerivedConstants constants_;
  double kappa_;
  double tail_exponent_;
  double z_q3_formal_;
};

}  // namespace selfsim
