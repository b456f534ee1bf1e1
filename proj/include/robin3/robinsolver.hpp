#pragma once

// Robin eigenvalues of Omega = Phi(D) for a univalent polynomial map
// Phi(z) = s (z + sum_k c_k z^k), computed in disk coordinates.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace robin3 {

struct DomainSpec {
  std::vector<std::complex<double>> coeffs;  // coeffs[i] is c_{i+2}
  double scale = 1.0;
  double area = 0.0;
  double perimeter = 0.0;
  double univalence_margin = 1.0;

  std::complex<double> phi(std::complex<double> z) const;
  std::complex<double> phi_prime(std::complex<double> z) const;
  /// Polynomial degree K of Phi.
  int degree() const { return static_cast<int>(coeffs.size()) + 1; }
};

/// Area by Parseval, perimeter by a 512-node trapezoid rule on |Phi'|.
/// Throws std::invalid_argument if 1 - sum k|c_k| <= 0.
DomainSpec build_domain(std::vector<std::complex<double>> coeffs, double scale = 1.0);

/// int_0^{2pi} |Phi'(e^{i theta})| d theta with an n-node trapezoid rule.
double perimeter_quadrature(const DomainSpec& domain, int nodes);

struct SolverConfig {
  double alpha = 0.0;  // boundary coefficient is alpha / L
  int N = 24;          // radial degree
  int M = 8;           // angular order
  int n_r = 0;         // 0 picks an exact rule for the domain
  int n_theta = 0;
};

/// Throws std::invalid_argument unless N >= 8, M >= 4 and any explicit
/// quadrature sizes satisfy n_r >= 2N, n_theta >= 4M + 1.
void validate(const SolverConfig& config);

/// Real Zernike-type basis on the disk, orthonormal in L^2(D):
/// r^m P_j^{(0,m)}(2r^2 - 1) times 1, cos(m theta), sin(m theta).
class DiskBasis {
 public:
  enum class Kind { Radial, Cos, Sin };
  struct Entry {
    int m;
    int j;
    Kind kind;
  };

  static constexpr int kMaxDegree = 64;

  DiskBasis(int N, int M);

  int N() const { return N_; }
  int M() const { return M_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const Entry& entry(int i) const { return entries_[i]; }

  /// Normalized radial factors psi_{m,j}(r) for j = 0..N and, optionally, d/dr.
  void radial(int m, double r, Eigen::Ref<Eigen::VectorXd> psi, Eigen::VectorXd* dpsi = nullptr) const;

  /// All basis functions at zeta.
  Eigen::VectorXd eval(std::complex<double> zeta) const;
  void eval(std::complex<double> zeta, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  int N_;
  int M_;
  std::vector<Entry> entries_;
  std::vector<double> norm_;  // radial normalization per (m, j)
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectrumResult {
  std::array<double, 4> lambdas{};
  Eigen::Matrix<double, Eigen::Dynamic, 4> eigvecs;  // Mass-orthonormal
  Eigen::VectorXd fstar;
  double rho = 0.0;
  double mean_f1 = 0.0;  // int_Omega f_1 dA, positive
  double mean_f2 = 0.0;
  double boundary_coefficient = 0.0;
  double orthonormality_residual = 0.0;
  double eigen_residual = 0.0;
  double convergence_estimate = 0.0;  // max_k |lambda_k(N) - lambda_k(N-4)|
  SolverConfig config;
  Eigen::VectorXd mean_vector;  // int_Omega phi_i dA

  int basis_size() const { return static_cast<int>(mean_vector.size()); }
  Eigen::VectorXd f(int k) const { return eigvecs.col(k); }

  double fstar_norm() const { return std::sqrt(1.0 + rho * rho); }
};

/// Galerkin solve of (K + (alpha/L) Bdry) c = lambda Mass c.
SpectrumResult solve_spectrum(const DomainSpec& domain, const SolverConfig& config);

/// f_2 - rho f_1 with rho chosen so the result has zero mean over Omega.
/// Throws SolverError when int f_1 is too small to divide by.
Eigen::VectorXd fstar(const SpectrumResult& result, const DomainSpec& domain);

/// int_Omega f dA for a coefficient vector f.
double domain_integral(const SpectrumResult& result, const Eigen::VectorXd& coeffs);

/// Evaluates a coefficient vector at a disk point.
double eval_function(const Eigen::VectorXd& coeffs, const DiskBasis& basis, std::complex<double> zeta);

}  // namespace robin3
