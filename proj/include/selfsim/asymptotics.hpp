#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "selfsim/params.hpp"

namespace selfsim {

// The five terms of  (f^m)'' + (N-1)/xi (f^m)' + alpha f + beta xi f' - xi^sigma f^p.
struct SsodeTerms {
  double diffusion = 0.0;  // (f^m)''
  double radial = 0.0;     // (N-1)/xi (f^m)'
  double linear = 0.0;     // alpha f
  double drift = 0.0;      // beta xi f'
  double absorption = 0.0; // -xi^sigma f^p

  double residual() const { return diffusion + radial + linear + drift + absorption; }
  double scale() const;
  double relative_residual() const;
};

// fm_pp is (f^m)'' supplied by the caller; f' is recovered from v = (f^m)'.
SsodeTerms ssode_terms(const Problem& pb, double xi, double f, double v, double fm_pp);

enum class SeriesOrder { kTwoTerm, kFull };

struct OriginExpansion {
  double amplitude = 0.0;
  // B_j for j = 0..n, coefficients of xi^j in f^m (odd entries are zero).
  std::vector<double> pme_coeffs;
  double sigma_term_coeff = 0.0;  // multiplies xi^{sigma+2}
  int order = 0;                  // highest j kept in pme_coeffs
};

struct SeriesValue {
  double f = 0.0;
  double fm_deriv = 0.0;
};

// Highest power of xi kept from the PME part of the origin series.
int pme_series_order(const Problem& pb);

// Taylor coefficients of phi^m, phi solving the PME part of the profile
// equation with phi(0) = A, phi'(0) = 0. Entry j multiplies xi^j.
std::vector<double> pme_series_coeffs(const Problem& pb, double A, int count);

OriginExpansion origin_expansion(const Problem& pb, double A, SeriesOrder order);
SeriesValue origin_eval(const Problem& pb, double A, double xi, SeriesOrder order);
SeriesValue origin_eval(const OriginExpansion& ex, const Problem& pb, double xi);

// Radius where the full-order series is used to start integration: the
// default 1e-3 A^{(m-1)/2}, shrunk when needed so that the launch sits well
// before the absorption term starts to matter.
double default_launch_radius(const Problem& pb, double A);

struct InterfaceLaw {
  double C = 0.0;
  double xi0 = 0.0;
  std::function<double(double)> f;
  std::function<double(double)> fm_deriv;
};

InterfaceLaw interface_law(const Problem& pb, double C);

struct SingularValue {
  double f = 0.0;
  double fm_deriv = 0.0;
  double fm_second = 0.0;
  double residual_identity = 0.0;
  double term_scale = 0.0;
};

// K xi^{-(sigma+2)/(p-m)}. Throws DomainError when Z0 does not exist.
SingularValue singular_solution_eval(const Problem& pb, double xi);

enum class TailKind { kP1, kPgamma };

struct TailLaw {
  TailKind kind = TailKind::kP1;
  double exponent = 0.0;
  std::optional<double> coefficient;
};

TailLaw p1_tail_law(const Problem& pb);
TailLaw pgamma_tail_law(const Problem& pb);

}  // namespace selfsim
