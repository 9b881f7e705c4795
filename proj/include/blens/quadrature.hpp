#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace blens {

/// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }

  template <typename F>
  auto integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    auto s = f(mid + rad * nodes[0]) * weights[0];
    for (std::size_t i = 1; i < nodes.size(); ++i) s += f(mid + rad * nodes[i]) * weights[i];
    return s * rad;
  }
};

/// Composite rule: equal panels of a shared Gauss-Legendre rule.
template <typename F>
auto integrate_panels(F&& f, double a, double b, int panels, const GaussLegendre& rule) {
  auto total = rule.integrate(f, a, a + (b - a) / panels);
  for (int p = 1; p < panels; ++p)
    total += rule.integrate(f, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
  return total;
}

}  // namespace blens
