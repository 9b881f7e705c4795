#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "blens/quadrature.hpp"
#include "blens/special_functions.hpp"
#include "blens/tridiag.hpp"

// The limiting laws: Marchenko-Pastur mp_gamma, the Gamma law, the
// associated-Laguerre measure mu_{alpha,c}, the rescaled high-temperature law
// nu_{gamma,c}, and the CLT variance functional for the MP regime.

namespace blens {

inline constexpr int kLawMomentCap = 30;

/// Marchenko-Pastur law with ratio parameter gamma in (0,1):
/// density sqrt((l+ - x)(x - l-)) / (2 pi gamma x) on [l-, l+],
/// l+- = (1 +- sqrt(gamma))^2.
struct MpLaw {
  double gamma;

  explicit MpLaw(double gamma) : gamma(gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("MpLaw: gamma must be in (0,1)");
  }

  double lambda_minus() const { return (1.0 - std::sqrt(gamma)) * (1.0 - std::sqrt(gamma)); }
  double lambda_plus() const { return (1.0 + std::sqrt(gamma)) * (1.0 + std::sqrt(gamma)); }
  double gamma_m() const { return 1.0 + gamma; }

  double density(double x) const {
    const double lm = lambda_minus(), lp = lambda_plus();
    if (x <= lm || x >= lp) return 0.0;
    return std::sqrt((lp - x) * (x - lm)) / (2.0 * std::numbers::pi * gamma * x);
  }

  /// r-th moment as the (1,1) entry of the r-th power of the semi-infinite
  /// MP operator; truncating to r+1 rows is exact by the band argument.
  double moment(int r) const {
    if (r < 0 || r > kLawMomentCap) throw std::invalid_argument("MpLaw::moment: r out of range");
    if (r == 0) return 1.0;
    JacobiMatrix J;
    J.diag.assign(r + 1, 1.0 + gamma);
    J.diag[0] = 1.0;
    J.offdiag.assign(r, std::sqrt(gamma));
    return moment_at_11(J, r, kLawMomentCap);
  }

  /// CDF through the substitution x = gamma_m + 2 sqrt(gamma) cos(theta),
  /// which removes both endpoint singularities.
  double cdf(double x) const {
    static const GaussLegendre rule(64);
    const double lm = lambda_minus(), lp = lambda_plus();
    if (x <= lm) return 0.0;
    if (x >= lp) return 1.0;
    const double s = std::sqrt(gamma);
    const double t = std::clamp((x - gamma_m()) / (2.0 * s), -1.0, 1.0);
    const double theta_x = std::acos(t);
    return rule.integrate(
        [&](double theta) {
          const double st = std::sin(theta);
          return (2.0 / std::numbers::pi) * st * st / (gamma_m() + 2.0 * s * std::cos(theta));
        },
        theta_x, std::numbers::pi);
  }

  /// Stieltjes transform S(z) = integral of d mp / (x - z), Im z != 0.
  /// Branch fixed by S(z) ~ -1/z at infinity (Herglotz off the real axis).
  std::complex<double> stieltjes(std::complex<double> z) const {
    if (z.imag() == 0.0) throw std::domain_error("MpLaw::stieltjes: z must be off the real axis");
    const std::complex<double> w =
        std::sqrt(z - lambda_minus()) * std::sqrt(z - lambda_plus());
    return (w - z - gamma + 1.0) / (2.0 * gamma * z);
  }
};

/// Gamma(shape, 1) law; the c = 0 degeneration of the associated-Laguerre
/// family has shape alpha + 1.
struct GammaLaw {
  double shape;

  explicit GammaLaw(double shape) : shape(shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("GammaLaw: shape must be > 0");
  }

  double density(double x) const {
    if (x < 0.0) return 0.0;
    return std::pow(x, shape - 1.0) * std::exp(-x) / std::tgamma(shape);
  }

  double moment(int r) const {
    double m = 1.0;
    for (int j = 0; j < r; ++j) m *= shape + j;
    return m;
  }
};

/// l_r(alpha, c) = (J_{alpha,c}^r)(1,1) where J_{alpha,c} = W W^t, W lower
/// bidiagonal with diag sqrt(alpha+c+i), subdiag sqrt(c+i). Truncation at
/// n_trunc >= r+1 rows is exact.
inline double jacobi_truncation_moment(double alpha, double c, int r, int n_trunc = -1) {
  if (r < 0 || r > kLawMomentCap)
    throw std::invalid_argument("jacobi_truncation_moment: r out of range");
  if (!(c >= 0.0) || !(alpha + c + 1.0 > 0.0))
    throw std::invalid_argument("jacobi_truncation_moment: need c >= 0 and alpha + c + 1 > 0");
  const int n = n_trunc > 0 ? n_trunc : r + 1;
  if (n < r + 1) throw std::invalid_argument("jacobi_truncation_moment: n_trunc < r + 1");
  std::vector<double> diag(n), sub(n - 1);
  for (int i = 1; i <= n; ++i) diag[i - 1] = std::sqrt(alpha + c + i);
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(c + i);
  return moment_at_11(to_jacobi(diag, sub), r, kLawMomentCap);
}

/// Associated-Laguerre measure mu_{alpha,c} (Model II): density
/// x^alpha e^{-x} / (Gamma(c+1) Gamma(1+c+alpha) |Psi(c, -alpha; x e^{-i pi})|^2).
struct AssocLaguerreLaw {
  double alpha;
  double c;

  AssocLaguerreLaw(double alpha, double c) : alpha(alpha), c(c) {
    if (!(alpha > -1.0)) throw std::invalid_argument("AssocLaguerreLaw: alpha must be > -1");
    if (!(c >= 0.0)) throw std::invalid_argument("AssocLaguerreLaw: c must be >= 0");
    if (!(alpha + c + 1.0 > 0.0))
      throw std::invalid_argument("AssocLaguerreLaw: need alpha + c + 1 > 0");
  }

  bool alpha_perturbed() const { return c != 0.0 && resolve_alpha(alpha).perturbed; }

  double density(double x) const {
    if (x < 0.0) return 0.0;
    if (c == 0.0) return GammaLaw(alpha + 1.0).density(x);
    if (x == 0.0) {
      if (alpha > 0.0) return 0.0;
      if (alpha < 0.0) return std::numeric_limits<double>::infinity();
      return 1.0;  // alpha = 0: |Psi(c,0;0)| = 1/Gamma(c+1) cancels the prefactor
    }
    const PsiValue psi = tricomi_psi_negaxis(c, alpha, x);
    const double mod2 = std::norm(psi.value);
    return std::pow(x, alpha) * std::exp(-x) /
           (std::tgamma(c + 1.0) * std::tgamma(1.0 + c + alpha) * mod2);
  }

  /// S(z) = Psi(c+1, 1-alpha; -z) / Psi(c, -alpha; -z), z off [0, inf).
  std::complex<double> stieltjes(std::complex<double> z) const {
    if (z.imag() == 0.0 && z.real() >= 0.0)
      throw std::domain_error("AssocLaguerreLaw::stieltjes: z on the nonnegative real axis");
    const std::complex<double> w = -z;
    const PsiValue num = tricomi_psi(c + 1.0, 1.0 - alpha, w);
    const PsiValue den = tricomi_psi(c, -alpha, w);
    return num.value / den.value;
  }

  double moment(int r) const { return jacobi_truncation_moment(alpha, c, r); }
};

/// High-temperature limit law nu_{gamma,c}: the law of (gamma/c) X with
/// X ~ mu_{alpha,c} and alpha = c/gamma - c - 1 (read off the displayed
/// Jacobi matrix, whose top-left entry is c/gamma). First moment is exactly 1.
struct NuLaw {
  double gamma;
  double c;

  NuLaw(double gamma, double c) : gamma(gamma), c(c) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("NuLaw: gamma must be in (0,1)");
    if (!(c > 0.0)) throw std::invalid_argument("NuLaw: c must be > 0");
  }

  double alpha() const { return c / gamma - c - 1.0; }
  double scale() const { return gamma / c; }

  double density(double x) const {
    if (x < 0.0) return 0.0;
    return AssocLaguerreLaw(alpha(), c).density(x / scale()) / scale();
  }

  double moment(int r) const {
    return std::pow(scale(), r) * jacobi_truncation_moment(alpha(), c, r);
  }
};

/// Integral over [0, x_cut] of an integrand behaving like x^a (a > -1) at
/// zero: the head goes through x = u^p with p picked so the substituted
/// integrand is at least C^2, the rest through plain panels.
template <typename F>
auto integrate_halfline(F&& f, double alpha_at_zero, double x_cut = 150.0, int panels = 60) {
  static const GaussLegendre rule(32);
  const int p =
      alpha_at_zero < 0.5 ? std::max(2, int(std::ceil(3.0 / (1.0 + alpha_at_zero)))) : 2;
  const auto head = integrate_panels(
      [&](double u) { return double(p) * std::pow(u, double(p - 1)) * f(std::pow(u, double(p))); },
      0.0, 1.0, 8, rule);
  const auto tail = integrate_panels(f, 1.0, x_cut, panels, rule);
  return head + tail;
}

/// Moments of a nonnegative-axis density by panel quadrature; alpha_at_zero
/// names the x^alpha behavior of the bare density at zero.
inline double moment_by_quadrature(const std::function<double(double)>& density, int r,
                                   double alpha_at_zero, double x_cut = 150.0,
                                   int panels = 60) {
  return integrate_halfline([&](double x) { return std::pow(x, r) * density(x); },
                            alpha_at_zero + r, x_cut, panels);
}

/// The MP-regime CLT variance functional
///   sigma_f^2 = (1/2 pi^2) int int (Df)^2 (4g - (x-gm)(y-gm)) /
///               (sqrt(4g-(x-gm)^2) sqrt(4g-(y-gm)^2)) dx dy
/// evaluated after x = gm + 2 sqrt(g) cos(theta), where the integrand
/// becomes (Df)^2 * 4g (1 - cos t cos s) / (2 pi^2) on [0,pi]^2. The divided
/// difference falls back to f' when |y - x| < 1e-7.
inline double clt_variance_mp(const std::function<double(double)>& f,
                              const std::function<double(double)>& f_prime, double gamma,
                              int grid = 128) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("clt_variance_mp: gamma must be in (0,1)");
  const GaussLegendre rule(grid);
  const double gm = 1.0 + gamma, s = std::sqrt(gamma);
  std::vector<double> theta(grid), w(grid), x(grid), fx(grid), ct(grid);
  for (int i = 0; i < grid; ++i) {
    theta[i] = 0.5 * std::numbers::pi * (1.0 + rule.nodes[i]);
    w[i] = 0.5 * std::numbers::pi * rule.weights[i];
    ct[i] = std::cos(theta[i]);
    x[i] = gm + 2.0 * s * ct[i];
    fx[i] = f(x[i]);
  }
  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double dx = x[j] - x[i];
      const double dd = std::fabs(dx) < 1e-7 ? f_prime(0.5 * (x[i] + x[j])) : (fx[j] - fx[i]) / dx;
      total += w[i] * w[j] * dd * dd * (1.0 - ct[i] * ct[j]);
    }
  }
  return total * 4.0 * gamma / (2.0 * std::numbers::pi * std::numbers::pi);
}

/// <mu_1, p> for the finite-beta mean-shift measure: atoms of mass 1/4 at
/// both support edges plus an arcsine-type continuous part.
inline double mu1_expectation(double gamma, const std::vector<double>& poly_coeffs) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("mu1_expectation: gamma must be in (0,1)");
  static const GaussLegendre rule(64);
  const auto p = [&](double x) {
    double v = 0.0;
    for (std::size_t i = poly_coeffs.size(); i-- > 0;) v = v * x + poly_coeffs[i];
    return v;
  };
  const double s = std::sqrt(gamma);
  const double lm = (1.0 - s) * (1.0 - s), lp = (1.0 + s) * (1.0 + s);
  const double atoms = 0.25 * p(lm) + 0.25 * p(lp);
  const double cont =
      rule.integrate([&](double theta) { return p(1.0 + gamma + 2.0 * s * std::cos(theta)); }, 0.0,
                     std::numbers::pi) /
      (2.0 * std::numbers::pi);
  return atoms + cont;
}

}  // namespace blens
