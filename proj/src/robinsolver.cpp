#include "robin3/robinsolver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numbers>
#include <sstream>
#include <string>

#include "robin3/quadrature.hpp"

namespace robin3 {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

cplx DomainSpec::phi(cplx z) const {
  // Horner on z (1 + c_2 z + c_3 z^2 + ...)
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * z;
  return scale * z * (1.0 + acc);
}

cplx DomainSpec::phi_prime(cplx z) const {
  cplx acc = 0.0;
  for (int k = static_cast<int>(coeffs.size()) + 1; k >= 2; --k) acc = (acc + double(k) * coeffs[k - 2]) * z;
  return scale * (1.0 + acc);
}

double perimeter_quadrature(const DomainSpec& domain, int nodes) {
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) sum += std::abs(domain.phi_prime(std::polar(1.0, 2.0 * kPi * k / nodes)));
  return sum * 2.0 * kPi / nodes;
}

DomainSpec build_domain(std::vector<cplx> coeffs, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("build_domain: scale must be positive");
  DomainSpec d;
  d.coeffs = std::move(coeffs);
  d.scale = scale;
  double margin = 1.0;
  double parseval = 1.0;
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) {
    const double k = double(i + 2);
    margin -= k * std::abs(d.coeffs[i]);
    parseval += k * std::norm(d.coeffs[i]);
  }
  d.univalence_margin = margin;
  if (!(margin > 0.0)) {
    std::ostringstream msg;
    msg << "build_domain: univalence margin 1 - sum k|c_k| = " << margin << " is not positive";
    throw std::invalid_argument(msg.str());
  }
  d.area = kPi * parseval * scale * scale;
  d.perimeter = perimeter_quadrature(d, 512);
  return d;
}

void validate(const SolverConfig& c) {
  std::ostringstream msg;
  if (c.N < 8) msg << "N must be >= 8 (got " << c.N << "); ";
  if (c.M < 4) msg << "M must be >= 4 (got " << c.M << "); ";
  if (c.n_r != 0 && c.n_r < 2 * c.N) msg << "n_r must be >= 2N; ";
  if (c.n_theta != 0 && c.n_theta < 4 * c.M + 1) msg << "n_theta must be >= 4M+1; ";
  if (!std::isfinite(c.alpha)) msg << "alpha must be finite; ";
  if (!msg.str().empty()) throw std::invalid_argument("solver config: " + msg.str());
}

DiskBasis::DiskBasis(int N, int M) : N_(N), M_(M) {
  if (N < 0 || M < 0 || N > kMaxDegree) throw std::invalid_argument("DiskBasis: sizes out of range");
  for (int j = 0; j <= N; ++j) entries_.push_back({0, j, Kind::Radial});
  for (int m = 1; m <= M; ++m) {
    for (int j = 0; j <= N; ++j) entries_.push_back({m, j, Kind::Cos});
    for (int j = 0; j <= N; ++j) entries_.push_back({m, j, Kind::Sin});
  }
  norm_.resize(std::size_t(M + 1) * (N + 1));
  for (int m = 0; m <= M; ++m) {
    const double ang = m == 0 ? 2.0 * kPi : kPi;
    for (int j = 0; j <= N; ++j) norm_[std::size_t(m) * (N + 1) + j] = std::sqrt(2.0 * (2 * j + m + 1) / ang);
  }
}

void DiskBasis::radial(int m, double r, Eigen::Ref<Eigen::VectorXd> psi, Eigen::VectorXd* dpsi) const {
  // Jacobi P_j^{(0,m)}(x), x = 2r^2 - 1, by the three-term recurrence
  double P[kMaxDegree + 1];
  double dP[kMaxDegree + 1];
  const double b = m;
  const double x = 2.0 * r * r - 1.0;
  P[0] = 1.0;
  dP[0] = 0.0;
  if (N_ >= 1) {
    P[1] = 1.0 + 0.5 * (b + 2.0) * (x - 1.0);
    dP[1] = 0.5 * (b + 2.0);
  }
  for (int n = 2; n <= N_; ++n) {
    const double s = 2.0 * n + b;
    const double c0 = 2.0 * n * (n + b) * (s - 2.0);
    const double a1 = (s - 1.0) * s * (s - 2.0);
    const double a0 = -(s - 1.0) * b * b;
    const double c2 = 2.0 * (n - 1) * (n + b - 1.0) * s;
    P[n] = ((a1 * x + a0) * P[n - 1] - c2 * P[n - 2]) / c0;
    dP[n] = ((a1 * x + a0) * dP[n - 1] + a1 * P[n - 1] - c2 * dP[n - 2]) / c0;
  }
  const double rm = std::pow(r, m);
  const double* nrm = &norm_[std::size_t(m) * (N_ + 1)];
  for (int j = 0; j <= N_; ++j) psi[j] = nrm[j] * rm * P[j];
  if (dpsi) {
    dpsi->resize(N_ + 1);
    const double rm1 = m == 0 ? 0.0 : m * std::pow(r, m - 1);
    for (int j = 0; j <= N_; ++j) (*dpsi)[j] = nrm[j] * (rm1 * P[j] + rm * 4.0 * r * dP[j]);
  }
}

void DiskBasis::eval(cplx zeta, Eigen::Ref<Eigen::VectorXd> out) const {
  const double r = std::abs(zeta);
  const double x = 2.0 * r * r - 1.0;
  const cplx e = r > 0.0 ? zeta / r : cplx(1.0);
  cplx em = 1.0;  // e^{i m theta}
  double rm = 1.0;
  double P[kMaxDegree + 1];
  int i = 0;
  for (int m = 0; m <= M_; ++m) {
    const double b = m;
    P[0] = 1.0;
    if (N_ >= 1) P[1] = 1.0 + 0.5 * (b + 2.0) * (x - 1.0);
    for (int n = 2; n <= N_; ++n) {
      const double s = 2.0 * n + b;
      P[n] = (((s - 1.0) * s * (s - 2.0) * x - (s - 1.0) * b * b) * P[n - 1] - 2.0 * (n - 1) * (n + b - 1.0) * s * P[n - 2]) /
             (2.0 * n * (n + b) * (s - 2.0));
    }
    const double* nrm = &norm_[std::size_t(m) * (N_ + 1)];
    if (m == 0) {
      for (int j = 0; j <= N_; ++j) out[i++] = nrm[j] * P[j];
    } else {
      const double c = rm * em.real();
      const double sn = rm * em.imag();
      for (int j = 0; j <= N_; ++j) out[i + j] = nrm[j] * c * P[j];
      for (int j = 0; j <= N_; ++j) out[i + N_ + 1 + j] = nrm[j] * sn * P[j];
      i += 2 * (N_ + 1);
    }
    em *= e;
    rm *= r;
  }
}

Eigen::VectorXd DiskBasis::eval(cplx zeta) const {
  Eigen::VectorXd out(size());
  eval(zeta, out);
  return out;
}

double eval_function(const Eigen::VectorXd& coeffs, const DiskBasis& basis, cplx zeta) {
  return coeffs.dot(basis.eval(zeta));
}

namespace {

struct RawSolve {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd vectors;
  Eigen::MatrixXd A;
  Eigen::MatrixXd mass;
  Eigen::VectorXd mean;
};

RawSolve solve_raw(const DomainSpec& domain, const SolverConfig& cfg, int N) {
  const int M = cfg.M;
  const int K = domain.degree();
  const DiskBasis basis(N, M);
  const int nb = basis.size();
  const int n_r = cfg.n_r > 0 ? cfg.n_r : 2 * N + M + K + 2;
  const int n_t = cfg.n_theta > 0 ? cfg.n_theta : 4 * M + 4 * K + 1;

  const QuadratureRule qr = gauss_legendre(n_r, 0.0, 1.0);
  const QuadratureRule qt = trapezoid_periodic(n_t);

  // stiffness: block diagonal and independent of Phi
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd psi(N + 1), dpsi;
  for (int m = 0; m <= M; ++m) {
    const double ang = m == 0 ? 2.0 * kPi : kPi;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (std::size_t a = 0; a < qr.size(); ++a) {
      const double r = qr.nodes[a];
      basis.radial(m, r, psi, &dpsi);
      const double w = qr.weights[a] * r * ang;
      block.noalias() += w * dpsi * dpsi.transpose();
      if (m > 0) block.noalias() += (w * m * m / (r * r)) * psi * psi.transpose();
    }
    if (m == 0) {
      stiff.block(0, 0, N + 1, N + 1) = block;
    } else {
      const int c = (N + 1) * (2 * m - 1);
      stiff.block(c, c, N + 1, N + 1) = block;
      stiff.block(c + N + 1, c + N + 1, N + 1, N + 1) = block;
    }
  }

  // mass: tensor rule with weight |Phi'|^2
  const int npts = n_r * n_t;
  Eigen::MatrixXd B(npts, nb);
  Eigen::VectorXd wts(npts);
  {
    Eigen::MatrixXd radial_tab((M + 1) * (N + 1), n_r);
    for (int a = 0; a < n_r; ++a)
      for (int m = 0; m <= M; ++m) basis.radial(m, qr.nodes[a], radial_tab.col(a).segment(m * (N + 1), N + 1));
    for (int a = 0; a < n_r; ++a)
      for (int t = 0; t < n_t; ++t) {
        const int q = a * n_t + t;
        const double r = qr.nodes[a];
        const double th = qt.nodes[t];
        wts[q] = qr.weights[a] * r * qt.weights[t] * std::norm(domain.phi_prime(std::polar(r, th)));
        B.row(q).segment(0, N + 1) = radial_tab.col(a).segment(0, N + 1).transpose();
        for (int m = 1; m <= M; ++m) {
          const int c = (N + 1) * (2 * m - 1);
          const auto rad = radial_tab.col(a).segment(m * (N + 1), N + 1).transpose();
          B.row(q).segment(c, N + 1) = rad * std::cos(m * th);
          B.row(q).segment(c + N + 1, N + 1) = rad * std::sin(m * th);
        }
      }
  }
  RawSolve out;
  out.mean = B.transpose() * wts;
  const Eigen::MatrixXd Bw = wts.cwiseSqrt().asDiagonal() * B;
  out.mass = Bw.transpose() * Bw;

  // boundary: 512-node trapezoid on the unit circle, weight |Phi'|
  const int n_b = 512;
  Eigen::MatrixXd Bb(n_b, nb);
  for (int k = 0; k < n_b; ++k) {
    const cplx e = std::polar(1.0, 2.0 * kPi * k / n_b);
    Bb.row(k) = basis.eval(e).transpose() * std::sqrt(2.0 * kPi / n_b * std::abs(domain.phi_prime(e)));
  }
  const Eigen::MatrixXd bdry = Bb.transpose() * Bb;

  const double coef = cfg.alpha / domain.perimeter;
  out.A = stiff + coef * bdry;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(out.A, out.mass);
  if (ges.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "solve_spectrum: generalized eigensolve failed (mass not positive definite or no convergence); N=" << N
        << " M=" << M << " n_r=" << n_r << " n_theta=" << n_t << " alpha=" << cfg.alpha;
    throw SolverError(msg.str());
  }
  out.lambdas = ges.eigenvalues();
  out.vectors = ges.eigenvectors();
  return out;
}

}  // namespace

SpectrumResult solve_spectrum(const DomainSpec& domain, const SolverConfig& config) {
  validate(config);
  RawSolve fine = solve_raw(domain, config, config.N);
  const RawSolve coarse = solve_raw(domain, config, config.N - 4);

  SpectrumResult res;
  res.config = config;
  res.boundary_coefficient = config.alpha / domain.perimeter;
  res.mean_vector = fine.mean;
  res.eigvecs = fine.vectors.leftCols(4);
  for (int k = 0; k < 4; ++k) {
    res.lambdas[k] = fine.lambdas[k];
    res.convergence_estimate = std::max(res.convergence_estimate, std::abs(fine.lambdas[k] - coarse.lambdas[k]));
  }

  // sign conventions: int f_1 > 0; other modes have a positive largest coefficient
  if (fine.mean.dot(res.eigvecs.col(0)) < 0.0) res.eigvecs.col(0) *= -1.0;
  for (int k = 1; k < 4; ++k) {
    Eigen::Index imax;
    res.eigvecs.col(k).cwiseAbs().maxCoeff(&imax);
    if (res.eigvecs(imax, k) < 0.0) res.eigvecs.col(k) *= -1.0;
  }

  const Eigen::Matrix4d gram = res.eigvecs.transpose() * fine.mass * res.eigvecs;
  res.orthonormality_residual = (gram - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff();
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXd v = res.eigvecs.col(k);
    const double r = (fine.A * v - res.lambdas[k] * (fine.mass * v)).norm() / std::max(1.0, std::abs(res.lambdas[k]));
    res.eigen_residual = std::max(res.eigen_residual, r);
  }

  res.mean_f1 = fine.mean.dot(res.eigvecs.col(0));
  res.mean_f2 = fine.mean.dot(res.eigvecs.col(1));
  res.fstar = fstar(res, domain);
  res.rho = res.mean_f2 / res.mean_f1;
  return res;
}

Eigen::VectorXd fstar(const SpectrumResult& result, const DomainSpec& domain) {
  const double m1 = result.mean_vector.dot(result.eigvecs.col(0));
  const double m2 = result.mean_vector.dot(result.eigvecs.col(1));
  // f_1 is Mass-normalized, so |f_1| = 1
  if (std::abs(m1) < 1e-10 * std::sqrt(domain.area)) throw SolverError("fstar: int f_1 vanishes; ground state degenerate or misordered");
  const double rho = m2 / m1;
  return result.eigvecs.col(1) - rho * result.eigvecs.col(0);
}

double domain_integral(const SpectrumResult& result, const Eigen::VectorXd& coeffs) {
  return result.mean_vector.dot(coeffs);
}

}  // namespace robin3
