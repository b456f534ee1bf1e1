#pragma once

// Robin spectrum of the unit disk with boundary condition du/dr + beta u = 0.

#include <array>
#include <complex>
#include <iosfwd>
#include <span>

namespace robin3 {

/// Second disk eigenpair lambda_2(D; beta) = x^2 with angular order one.
struct RobinDiskMode {
  double beta = 0.0;
  double x = 0.0;
  double lambda = 0.0;
  int angular_order = 1;
};

/// Radial part g of the complex eigenfunction v = g(r) e^{i theta}.
/// g(r) = J_1(x r) for beta > -1 and g(r) = r for beta = -1.
class RadialProfile {
 public:
  explicit RadialProfile(const RobinDiskMode& mode);

  const RobinDiskMode& mode() const { return mode_; }
  bool harmonic() const { return harmonic_; }

  double g(double r) const;
  double g_prime(double r) const;
  /// max of g on [0, 1].
  double g_max() const { return g_max_; }

  /// v(z) = g(|z|) z/|z|, smooth through the origin.
  std::complex<double> v(std::complex<double> z) const;

  /// 2 pi int_0^1 (g'^2 + g^2/r^2) r dr
  double dirichlet_energy() const { return dirichlet_; }
  /// 2 pi int_0^1 g^2 r dr
  double mass() const { return mass_; }

 private:
  RobinDiskMode mode_;
  bool harmonic_ = false;
  double g_max_ = 0.0;
  double dirichlet_ = 0.0;
  double mass_ = 0.0;
};

/// Smallest positive root of x J_1'(x) + beta J_1(x) = 0, beta >= -1.
RobinDiskMode disk_lambda2(double beta);

/// lambda_1(D; beta); negative for beta < 0 (modified Bessel branch).
double disk_lambda1(double beta);

/// lambda_1..lambda_4 of the disk counted with multiplicity.
std::array<double, 4> disk_lambda_table(double beta);

/// The k-th (1-based) positive root of x J_m'(x) + beta J_m(x) = 0, m in {0, 1, 2}.
double robin_bessel_root(int order, double beta, int k);

/// CSV rows "beta,r,g" for each beta on an n_r-point uniform grid of [0, 1].
void write_profile_csv(std::ostream& out, std::span<const double> betas, int n_r = 400);

}  // namespace robin3
