#pragma once

#include <vector>

namespace robin3 {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss rule for int_0^1 f(r) r dr (Gauss-Legendre in r^2).
QuadratureRule gauss_radial(int n);

/// Periodic trapezoid nodes 2*pi*k/n with equal weights 2*pi/n.
QuadratureRule trapezoid_periodic(int n);

}  // namespace robin3
