#include "selfsim/asymptotics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim {

double SsodeTerms::scale() const {
  return std::abs(diffusion) + std::abs(radial) + std::abs(linear) + std::abs(drift) +
         std::abs(absorption);
}

double SsodeTerms::relative_residual() const {
  const double s = scale();
  return s > 0.0 ? std::abs(residual()) / s : 0.0;
}

SsodeTerms ssode_terms(const Problem& pb, double xi, double f, double v, double fm_pp) {
  if (!(xi > 0.0) || !(f > 0.0)) throw DomainError("operator needs xi > 0 and f > 0");
  const double fp = v * std::pow(f, 1.0 - pb.m()) / pb.m();
  SsodeTerms t;
  t.diffusion = fm_pp;
  t.radial = (pb.dim() - 1) * v / xi;
  t.linear = pb.alpha() * f;
  t.drift = pb.beta() * xi * fp;
  t.absorption = -std::pow(xi, pb.sigma()) * std::pow(f, pb.p());
  return t;
}

int pme_series_order(const Problem& pb) {
  const double s = pb.sigma();
  // For integer sigma the series keeps one more PME term.
  if (s == std::floor(s)) return static_cast<int>(s) - 1 + 3;
  return static_cast<int>(std::floor(s)) + 2;
}

std::vector<double> pme_series_coeffs(const Problem& pb, double A, int count) {
  if (!(A > 0.0)) throw ParameterError("amplitude A must be positive");
  if (count < 0) throw ParameterError("coefficient count must be non-negative");
  const double m = pb.m();
  const double r = 1.0 / m;
  const int n = pb.dim();
  const int kmax = count / 2;

  // Work in s = xi^2: G(s) = phi^m = sum g_k s^k and phi = G^{1/m}.
  std::vector<double> g(kmax + 1, 0.0), phi(kmax + 1, 0.0);
  g[0] = std::pow(A, m);
  phi[0] = A;
  assert(g[0] > 0.0);
  for (int k = 0; k < kmax; ++k) {
    g[k + 1] = -(pb.alpha() + 2.0 * k * pb.beta()) * phi[k] /
               (2.0 * (k + 1) * (2.0 * k + n));
    // Power of a series: phi_{k+1} from g_1..g_{k+1}.
    const int kk = k + 1;
    double acc = 0.0;
    for (int j = 1; j <= kk; ++j) acc += ((r + 1.0) * j - kk) * g[j] * phi[kk - j];
    phi[kk] = acc / (kk * g[0]);
  }

  std::vector<double> out(count + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) out[2 * k] = g[k];
  return out;
}

OriginExpansion origin_expansion(const Problem& pb, double A, SeriesOrder order) {
  OriginExpansion ex;
  ex.amplitude = A;
  ex.order = order == SeriesOrder::kTwoTerm ? 2 : pme_series_order(pb);
  ex.pme_coeffs = pme_series_coeffs(pb, A, std::max(ex.order, 0));
  ex.sigma_term_coeff = order == SeriesOrder::kTwoTerm
                            ? 0.0
                            : std::pow(A, pb.p()) /
                                  ((pb.sigma() + 2.0) * (pb.sigma() + pb.dim()));
  return ex;
}

SeriesValue origin_eval(const OriginExpansion& ex, const Problem& pb, double xi) {
  if (!(xi >= 0.0)) throw DomainError("origin series needs xi >= 0");
  const double a_m = ex.pme_coeffs.empty() ? std::pow(ex.amplitude, pb.m()) : ex.pme_coeffs[0];
  if (xi == 0.0) return {ex.amplitude, 0.0};

  double F = 0.0, dF = 0.0;
  for (int j = static_cast<int>(ex.pme_coeffs.size()) - 1; j >= 0; --j) {
    F = F * xi + ex.pme_coeffs[j];
  }
  for (int j = static_cast<int>(ex.pme_coeffs.size()) - 1; j >= 1; --j) {
    dF = dF * xi + j * ex.pme_coeffs[j];
  }
  if (ex.sigma_term_coeff != 0.0) {
    const double s2 = pb.sigma() + 2.0;
    F += ex.sigma_term_coeff * std::pow(xi, s2);
    dF += ex.sigma_term_coeff * s2 * std::pow(xi, s2 - 1.0);
  }
  if (std::abs(F - a_m) > 0.5 * a_m) {
    std::ostringstream os;
    os << "origin series invalid at xi=" << xi << ": correction exceeds half of A^m";
    throw SeriesValidityError(os.str());
  }
  return {std::pow(F, 1.0 / pb.m()), dF};
}

SeriesValue origin_eval(const Problem& pb, double A, double xi, SeriesOrder order) {
  if (!(A > 0.0)) throw ParameterError("amplitude A must be positive");
  return origin_eval(origin_expansion(pb, A, order), pb, xi);
}

double default_launch_radius(const Problem& pb, double A) {
  const double m = pb.m();
  double xi = 1e-3 * std::pow(A, 0.5 * (m - 1.0));
  // Keep z = xi^{sigma+2} A^{p-m}/m below 1e-7 so the neglected products of
  // the absorption term stay under double rounding.
  const double z_cap = 1e-7;
  xi = std::min(xi, std::pow(z_cap * m * std::pow(A, m - pb.p()), 1.0 / (pb.sigma() + 2.0)));
  // Large amplitudes also need Z = xi^sigma A^{p-1}/alpha small, otherwise the
  // launch would already sit past the point where absorption takes over.
  if (pb.sigma() > 0.0) {
    const double Z_cap = 1e-4;
    xi = std::min(xi, std::pow(Z_cap * pb.alpha() * std::pow(A, 1.0 - pb.p()), 1.0 / pb.sigma()));
  }
  return xi;
}

InterfaceLaw interface_law(const Problem& pb, double C) {
  if (!(C > 0.0)) throw ParameterError("interface coefficient C must be positive");
  const double m = pb.m();
  const double beta = pb.beta();
  InterfaceLaw law;
  law.C = C;
  law.xi0 = std::sqrt(2.0 * m * C / (beta * (m - 1.0)));
  auto base = [=](double xi) { return std::max(0.0, C - beta * (m - 1.0) * xi * xi / (2.0 * m)); };
  law.f = [=](double xi) { return std::pow(base(xi), 1.0 / (m - 1.0)); };
  law.fm_deriv = [=](double xi) { return -beta * xi * std::pow(base(xi), 1.0 / (m - 1.0)); };
  return law;
}

SingularValue singular_solution_eval(const Problem& pb, double xi) {
  const auto& k = pb.constants().K_sing;
  if (!k) throw DomainError("singular profile needs Z0, which does not exist for these parameters");
  if (!(xi > 0.0)) throw DomainError("singular profile needs xi > 0");
  const double m = pb.m();
  const double tau = pb.tail_exponent();
  SingularValue out;
  out.f = *k * std::pow(xi, -tau);
  const double fm = std::pow(out.f, m);
  out.fm_deriv = -m * tau * fm / xi;
  out.fm_second = m * tau * (m * tau + 1.0) * fm / (xi * xi);
  const SsodeTerms t = ssode_terms(pb, xi, out.f, out.fm_deriv, out.fm_second);
  out.residual_identity = t.residual();
  out.term_scale = t.scale();
  return out;
}

TailLaw p1_tail_law(const Problem& pb) {
  return {TailKind::kP1, -pb.tail_exponent(), std::nullopt};
}

TailLaw pgamma_tail_law(const Problem& pb) {
  const double p = pb.p();
  return {TailKind::kPgamma, -pb.sigma() / (p - 1.0), std::pow(1.0 / (p - 1.0), 1.0 / (p - 1.0))};
}

}  // namespace selfsim
