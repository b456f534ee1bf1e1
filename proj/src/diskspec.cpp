#include "robin3/diskspec.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "robin3/bessel.hpp"
#include "robin3/quadrature.hpp"
#include "roots.hpp"

namespace robin3 {
namespace {

void check_beta(double beta) {
  if (!(beta >= -1.0))
    throw std::domain_error("disk spectrum: beta < -1 gives negative lambda_2 (not supported)");
}

// (x J_m' + beta J_m) / x^m, finite and nonzero-limited at x = 0.
double characteristic(int m, double beta, double x) {
  switch (m) {
    case 0:
      return -x * bessel_j(1, x) + beta * bessel_j(0, x);
    case 1:
      return bessel_j(0, x) + (beta - 1.0) * bessel_j_scaled(1, x);
    case 2:
      return bessel_j_scaled(1, x) + (beta - 2.0) * bessel_j_scaled(2, x);
    default:
      throw std::invalid_argument("characteristic: unsupported angular order");
  }
}

}  // namespace

double robin_bessel_root(int order, double beta, int k) {
  if (order < 0 || order > 2) throw std::invalid_argument("robin_bessel_root: order must be 0, 1 or 2");
  if (k < 1) throw std::invalid_argument("robin_bessel_root: k must be >= 1");
  auto f = [&](double x) { return characteristic(order, beta, x); };
  // start just off the origin: the zero root for (m = 0, beta = 0) is not positive
  const double lo = 1e-12;
  const auto root = detail::kth_root(f, lo, 48.0, 800, k);
  if (!root) throw std::runtime_error("robin_bessel_root: root not bracketed");
  return *root;
}

RobinDiskMode disk_lambda2(double beta) {
  check_beta(beta);
  RobinDiskMode mode;
  mode.beta = beta;
  mode.angular_order = 1;
  if (beta == -1.0) return mode;  // harmonic mode g(r) = r, lambda = 0
  auto f = [&](double x) { return characteristic(1, beta, x); };
  const auto root = detail::kth_root(f, 0.0, kJ11, 64, 1);
  if (!root) throw std::runtime_error("disk_lambda2: no root in (0, j11)");
  mode.x = *root;
  mode.lambda = mode.x * mode.x;
  return mode;
}

double disk_lambda1(double beta) {
  check_beta(beta);
  if (beta == 0.0) return 0.0;
  if (beta > 0.0) {
    const double x = robin_bessel_root(0, beta, 1);
    return x * x;
  }
  // lambda = -y^2 with y I_1(y) + beta I_0(y) = 0
  auto f = [&](double y) { return y * bessel_i(1, y) + beta * bessel_i(0, y); };
  const double hi = std::abs(beta) + 2.0;
  const double y = detail::bracketed_root(f, 0.0, hi, f(0.0), f(hi));
  return -y * y;
}

std::array<double, 4> disk_lambda_table(double beta) {
  check_beta(beta);
  std::vector<double> c;
  auto sq = [](double x) { return x * x; };
  // m = 0: ground state, then the next radial mode
  c.push_back(disk_lambda1(beta));
  c.push_back(sq(robin_bessel_root(0, beta, beta > 0.0 ? 2 : 1)));
  // m = 1 and m = 2 are doubly degenerate
  const double l2 = disk_lambda2(beta).lambda;
  const double l2b = sq(robin_bessel_root(1, beta, beta == -1.0 ? 1 : 2));
  const double l4 = sq(robin_bessel_root(2, beta, 1));
  for (double v : {l2, l2, l2b, l2b, l4, l4}) c.push_back(v);
  std::sort(c.begin(), c.end());
  return {c[0], c[1], c[2], c[3]};
}

RadialProfile::RadialProfile(const RobinDiskMode& mode) : mode_(mode) {
  harmonic_ = mode.beta == -1.0;
  if (harmonic_) {
    g_max_ = 1.0;
    dirichlet_ = 2.0 * std::numbers::pi;
    mass_ = 0.5 * std::numbers::pi;
    return;
  }
  g_max_ = mode.x <= kJ11Prime ? g(1.0) : bessel_j(1, kJ11Prime);
  const QuadratureRule q = gauss_legendre(48, 0.0, 1.0);
  double d = 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = q.nodes[i];
    const double gr = mode.x * bessel_j_scaled(1, mode.x * r);  // g(r)/r
    const double gp = g_prime(r);
    d += q.weights[i] * (gp * gp + gr * gr) * r;
    m += q.weights[i] * gr * gr * r * r * r;
  }
  dirichlet_ = 2.0 * std::numbers::pi * d;
  mass_ = 2.0 * std::numbers::pi * m;
}

double RadialProfile::g(double r) const {
  if (harmonic_) return r;
  return bessel_j(1, mode_.x * r);
}

double RadialProfile::g_prime(double r) const {
  if (harmonic_) return 1.0;
  return mode_.x * bessel_j_prime(1, mode_.x * r);
}

std::complex<double> RadialProfile::v(std::complex<double> z) const {
  if (harmonic_) return z;
  return z * (mode_.x * bessel_j_scaled(1, mode_.x * std::abs(z)));
}

void write_profile_csv(std::ostream& out, std::span<const double> betas, int n_r) {
  if (n_r < 2) throw std::invalid_argument("write_profile_csv: need at least two radii");
  out << "beta,r,g\n";
  out << std::setprecision(17);
  for (double beta : betas) {
    const RadialProfile profile(disk_lambda2(beta));
    for (int i = 0; i < n_r; ++i) {
      const double r = double(i) / (n_r - 1);
      out << beta << ',' << r << ',' << profile.g(r) << '\n';
    }
  }
}

}  // namespace robin3
