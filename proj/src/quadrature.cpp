#include "robin3/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace robin3 {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule gauss_radial(int n) {
  // int_0^1 f(r) r dr = 1/2 int_0^1 f(sqrt(s)) ds
  QuadratureRule s = gauss_legendre(n, 0.0, 1.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.nodes[i] = std::sqrt(s.nodes[i]);
    s.weights[i] *= 0.5;
  }
  return s;
}

QuadratureRule trapezoid_periodic(int n) {
  if (n < 1) throw std::invalid_argument("trapezoid_periodic: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, 2.0 * std::numbers::pi / n);
  for (int k = 0; k < n; ++k) rule.nodes[k] = 2.0 * std::numbers::pi * k / n;
  return rule;
}

}  // namespace robin3
