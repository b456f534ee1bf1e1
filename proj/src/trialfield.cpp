#include "robin3/trialfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "robin3/quadrature.hpp"

namespace robin3 {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

RadialProfile default_profile(double alpha) { return RadialProfile(disk_lambda2(alpha / (4.0 * kPi))); }

cplx trial_eval(const TrialParams& params, const RadialProfile& profile, cplx zeta) {
  if (params.cap.degenerate()) return profile.v(moebius_apply(params.w, zeta));
  const cplx z = fold(params.cap, zeta);
  return profile.v(moebius_apply(params.w, cap_map(params.cap, z)));
}

SphereParam psi(const MoebiusParam<>& w, cplx p, double t) {
  const double r2 = std::norm(w.value());
  return {std::sqrt(2.0 - r2) * w.value(), (1.0 - r2) * p, t};
}

std::pair<MoebiusParam<>, std::optional<cplx>> psi_inverse(const SphereParam& sp) {
  const double na = std::min(1.0, std::norm(sp.a));
  const double nb = std::abs(sp.b);
  if (nb == 0.0) {
    if (std::abs(na - 1.0) > 1e-12) throw std::invalid_argument("psi_inverse: b = 0 requires |a| = 1");
    return {MoebiusParam<>(sp.a / std::abs(sp.a)), std::nullopt};
  }
  const cplx w = sp.a / std::sqrt(1.0 + std::sqrt(1.0 - na));
  return {MoebiusParam<>(w), sp.b / nb};
}

FoldQuadrature::FoldQuadrature(const CapParams<>& cap, const DomainSpec& domain, const SpectrumResult& spectrum,
                               FoldOrder order)
    : cap_(cap) {
  const DiskBasis basis(spectrum.config.N, spectrum.config.M);
  const Eigen::VectorXd f1 = spectrum.eigvecs.col(0);
  const Eigen::VectorXd& fs = spectrum.fstar;
  Eigen::VectorXd phi(basis.size());

  struct Sample {
    double f1, fs, weight;
  };
  auto sample = [&](cplx z, double jac) {
    basis.eval(z, phi);
    const double wgt = jac * std::norm(domain.phi_prime(z));
    return Sample{f1.dot(phi) * wgt, fs.dot(phi) * wgt, wgt};
  };
  auto push = [&](cplx inner, double w, const Sample& s1, const Sample& s2) {
    inner_.push_back(inner);
    w1_.push_back(w * (s1.f1 + s2.f1));
    wstar_.push_back(w * (s1.fs + s2.fs));
    wmass_.push_back(w * (s1.weight + s2.weight));
  };

  if (cap.degenerate()) {
    const QuadratureRule qr = gauss_legendre(3 * order.radial, 0.0, 1.0);
    const QuadratureRule qt = trapezoid_periodic(6 * order.angular);
    for (std::size_t a = 0; a < qr.size(); ++a)
      for (std::size_t k = 0; k < qt.size(); ++k) {
        const cplx z = std::polar(qr.nodes[a], qt.nodes[k]);
        push(z, qr.weights[a] * qr.nodes[a] * qt.weights[k], sample(z, 1.0), Sample{0, 0, 0});
      }
  } else {
    const cplx p = cap.p;
    const cplx s = -p * cap.t;
    const CapMap<> G(cap);
    // polar coordinates about the pole, eta = p + rho p e^{i psi}; the integrand
    // concentrates within (1 - t) of the pole as t -> 1
    const double rho0 = std::max(0.5 * (1.0 - cap.t), 1e-9);
    // angular panels split at the corner directions and graded toward the two
    // tangent directions, where the region near the pole thins out
    std::vector<std::pair<double, double>> panels;
    {
      const double edge = 0.5 * kPi, corner = 0.25 * kPi;
      std::vector<double> cuts{0.0};
      for (double c = rho0; c < corner; c *= 3.0) cuts.push_back(c);
      cuts.push_back(corner);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        panels.push_back({edge + cuts[i], edge + cuts[i + 1]});
        panels.push_back({3.0 * edge - cuts[i + 1], 3.0 * edge - cuts[i]});
      }
      // the cap map has a pole behind the geodesic, close to the rays near -p
      for (int i = 0; i < 4; ++i) panels.push_back({(0.75 + 0.125 * i) * kPi, (0.875 + 0.125 * i) * kPi});
    }
    const QuadratureRule ga = gauss_legendre(order.angular, 0.0, 1.0);
    const QuadratureRule gr = gauss_legendre(order.radial, 0.0, 1.0);
    for (const auto& [lo, hi] : panels) {
      for (std::size_t ia = 0; ia < ga.size(); ++ia) {
        const double ang = lo + (hi - lo) * ga.nodes[ia];
        const double wa = (hi - lo) * ga.weights[ia];
        const double c = std::cos(ang);
        const double rho_max = std::min(-2.0 * c, -1.0 / c);
        const cplx dir = p * std::polar(1.0, ang);
        double a = 0.0, b = std::min(rho0, rho_max);
        while (a < rho_max) {
          for (std::size_t ir = 0; ir < gr.size(); ++ir) {
            const double rho = a + (b - a) * gr.nodes[ir];
            const double w = wa * (b - a) * gr.weights[ir] * rho;
            const cplx eta = p + rho * dir;
            const cplx eta2 = reflect(p, eta);
            const cplx z1 = moebius_apply(s, eta);
            const cplx z2 = moebius_apply(s, eta2);
            const Sample s1 = sample(z1, std::norm(moebius_derivative(s, eta)));
            const Sample s2 = sample(z2, std::norm(moebius_derivative(s, eta2)));
            push(G(z1), w, s1, s2);
          }
          a = b;
          b = std::min(3.0 * b, rho_max);
        }
      }
    }
  }
  for (std::size_t k = 0; k < inner_.size(); ++k) {
    sum_f1_ += w1_[k];
    sum_mass_ += wmass_[k];
  }
}

VectorFieldValue FoldQuadrature::field(const std::vector<cplx>& h) const {
  VectorFieldValue v;
  for (std::size_t k = 0; k < h.size(); ++k) {
    v.inner1 += h[k] * w1_[k];
    v.inner2 += h[k] * wstar_[k];
  }
  return v;
}

double FoldQuadrature::mass(const std::vector<cplx>& h) const {
  double m = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) m += std::norm(h[k]) * wmass_[k];
  return m;
}

TrialField::TrialField(const DomainSpec& domain, const SpectrumResult& spectrum, RadialProfile profile, FoldOrder order)
    : domain_(&domain), spectrum_(&spectrum), profile_(std::move(profile)), order_(order) {}

std::vector<cplx> TrialField::trial_values(const TrialParams& params, const FoldQuadrature& quad) const {
  const auto& pts = quad.inner_points();
  std::vector<cplx> h(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) h[k] = profile_.v(moebius_apply(params.w, pts[k]));
  return h;
}

VectorFieldValue TrialField::value(const TrialParams& params, const FoldQuadrature& quad) const {
  return quad.field(trial_values(params, quad));
}

VectorFieldValue TrialField::value(const TrialParams& params) const {
  const FoldQuadrature quad(params.cap, *domain_, *spectrum_, order_);
  return value(params, quad);
}

VectorFieldValue TrialField::value_checked(const TrialParams& params) const {
  VectorFieldValue v = value(params);
  const FoldQuadrature fine(params.cap, *domain_, *spectrum_, {2 * order_.radial, 2 * order_.angular});
  const VectorFieldValue v2 = value(params, fine);
  v.quadrature_error = (v.vec() - v2.vec()).norm();
  return v;
}

VectorFieldValue TrialField::sphere_value(const SphereParam& sp) const {
  const auto [w, p] = psi_inverse(sp);
  TrialParams params{w, CapParams<>(p.value_or(cplx(1.0)), std::clamp(sp.t, 0.0, 1.0))};
  return value(params);
}

double TrialField::scaled(const VectorFieldValue& v) const {
  const double scale = profile_.g_max() * std::sqrt(domain_->area) * std::max(1.0, spectrum_->fstar_norm());
  return v.norm() / scale;
}

RayleighBreakdown TrialField::rayleigh(const TrialParams& params) const {
  RayleighBreakdown r;
  r.dirichlet = (params.cap.degenerate() ? 1.0 : 2.0) * profile_.dirichlet_energy();
  const int nb = 1024;
  for (int k = 0; k < nb; ++k) {
    const cplx e = std::polar(1.0, 2.0 * kPi * k / nb);
    r.boundary_term += std::norm(trial_eval(params, profile_, e)) * std::abs(domain_->phi_prime(e));
  }
  r.boundary_term *= 2.0 * kPi / nb;
  const FoldQuadrature quad(params.cap, *domain_, *spectrum_, order_);
  r.mass = quad.mass(trial_values(params, quad));
  const double gm = profile_.g_max();
  if (!(r.mass > 1e-12 * gm * gm * domain_->area)) throw std::runtime_error("rayleigh: trial function has vanishing mass");
  r.quotient = (r.dirichlet + spectrum_->config.alpha / domain_->perimeter * r.boundary_term) / r.mass;
  return r;
}

cplx ZeroCandidate::p() const { return psi_inverse(params).second.value_or(cplx(1.0)); }

TrialParams ZeroCandidate::trial() const {
  const auto [w, p] = psi_inverse(params);
  return {w, CapParams<>(p.value_or(cplx(1.0)), params.t)};
}

namespace {

struct Chart {
  Eigen::Vector4d x;
  Eigen::Matrix<double, 4, 3> tangent;

  explicit Chart(const Eigen::Vector4d& center) : x(center.normalized()) {
    // complete x to an orthonormal frame
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.col(0) = x;
    Eigen::HouseholderQR<Eigen::Matrix4d> qr(m);
    const Eigen::Matrix4d q = qr.householderQ();
    tangent = q.rightCols<3>();
  }
  Eigen::Vector4d point(const Eigen::Vector3d& y) const { return (x + tangent * y).normalized(); }
};

class Solver {
 public:
  Solver(const TrialField& field, const SearchConfig& cfg) : field_(field), cfg_(cfg) {}

  // scaled residual vector at a sphere point; infinite outside the chart's valid range
  Eigen::Vector4d residual(const Eigen::Vector4d& x, double t) const {
    const SphereParam sp = SphereParam::from_vec(x, t);
    if (std::abs(sp.b) < 1e-9) return Eigen::Vector4d::Constant(1e3);
    const VectorFieldValue v = field_.sphere_value(sp);
    return v.vec() / scale();
  }

  double scale() const { return field_.scaled(VectorFieldValue{cplx(1.0), cplx(0.0)}); }

  ZeroCandidate refine(const Eigen::Vector4d& x0, double t0) const {
    Eigen::Vector4d x = x0.normalized();
    double t = t0;
    Eigen::Vector4d F = residual(x, t);
    double mu = 1e-3;
    int it = 0;
    for (; it < cfg_.max_iterations && F.norm() >= 0.1 * cfg_.tolerance; ++it) {
      const Chart chart(x);
      Eigen::Matrix4d J;
      const double h = 1e-6;
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d y = Eigen::Vector3d::Zero();
        y[k] = h;
        J.col(k) = (residual(chart.point(y), t) - residual(chart.point(-y), t)) / (2 * h);
      }
      if (t + h <= 1.0 && t - h >= 0.0)
        J.col(3) = (residual(x, t + h) - residual(x, t - h)) / (2 * h);
      else if (t + h > 1.0)
        J.col(3) = (F - residual(x, t - h)) / h;
      else
        J.col(3) = (residual(x, t + h) - F) / h;

      bool accepted = false;
      for (int tries = 0; tries < 12 && !accepted; ++tries) {
        const Eigen::Matrix4d A = J.transpose() * J + mu * Eigen::Matrix4d::Identity();
        Eigen::Vector4d step = -A.ldlt().solve(J.transpose() * F);
        const double len = step.norm();
        if (len > 0.3) step *= 0.3 / len;
        const Eigen::Vector4d xn = chart.point(step.head<3>());
        const double tn = std::clamp(t + step[3], 0.0, 1.0);
        const Eigen::Vector4d Fn = residual(xn, tn);
        if (Fn.norm() < F.norm()) {
          x = xn;
          t = tn;
          F = Fn;
          mu = std::max(mu / 10.0, 1e-12);
          accepted = true;
        } else {
          mu *= 10.0;
        }
      }
      if (!accepted) break;
    }
    ZeroCandidate c;
    c.params = SphereParam::from_vec(x, t);
    c.residual = F.norm();
    c.iterations = it;
    c.converged = c.residual < cfg_.tolerance && std::abs(c.params.b) > 0.0;
    return c;
  }

 private:
  const TrialField& field_;
  const SearchConfig& cfg_;
};

struct ScanPoint {
  double residual;
  Eigen::Vector4d x;
  double t;
};

}  // namespace

SearchResult find_zero(const TrialField& field, const SearchConfig& cfg) {
  const DomainSpec& domain = field.domain();
  const SpectrumResult& spectrum = field.spectrum();
  const double scale = field.scaled(VectorFieldValue{cplx(1.0), cplx(0.0)});

  // coarse scan
  std::vector<ScanPoint> scan;
  const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double t : ts) {
    const int np = t >= 1.0 ? 1 : 16;
    for (int ip = 0; ip < np; ++ip) {
      const cplx p = std::polar(1.0, 2.0 * kPi * ip / 16);
      const FoldQuadrature quad(CapParams<>(p, t), domain, spectrum, cfg.scan_order);
      for (int ir = 0; ir < 17; ++ir)
        for (int ia = 0; ia < (ir == 0 ? 1 : 17); ++ia) {
          const MoebiusParam<> w(std::polar(ir / 17.0, 2.0 * kPi * ia / 17));
          const VectorFieldValue v = field.value({w, CapParams<>(p, t)}, quad);
          if (t >= 1.0) {
            // V does not depend on p at t = 1; seed several p
            for (int k = 0; k < 4; ++k)
              scan.push_back({v.norm() / scale, psi(w, std::polar(1.0, 0.5 * kPi * k), t).vec(), t});
          } else {
            scan.push_back({v.norm() / scale, psi(w, p, t).vec(), t});
          }
        }
    }
  }
  std::stable_sort(scan.begin(), scan.end(), [](const ScanPoint& a, const ScanPoint& b) { return a.residual < b.residual; });

  std::vector<ScanPoint> starts;
  for (const auto& s : scan) {
    bool far = true;
    for (const auto& o : starts) far = far && ((s.x - o.x).norm() + std::abs(s.t - o.t) > 0.2);
    if (far) starts.push_back(s);
    if (static_cast<int>(starts.size()) >= cfg.starts) break;
  }

  const TrialField fine(domain, spectrum, field.profile(), cfg.order);
  const Solver solver(fine, cfg);
  std::vector<ZeroCandidate> results(starts.size());
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(starts.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) results[i] = solver.refine(starts[i].x, starts[i].t);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&, j] {
        for (std::size_t i = j; i < starts.size(); i += jobs) results[i] = solver.refine(starts[i].x, starts[i].t);
      });
    for (auto& th : pool) th.join();
  }

  SearchResult out;
  out.best = results.front();
  for (const auto& c : results) {
    if (c.residual < out.best.residual) out.best = c;
    if (!c.converged) continue;
    bool distinct = true;
    for (const auto& z : out.zeros)
      distinct = distinct && ((c.params.vec() - z.params.vec()).norm() + std::abs(c.params.t - z.params.t) > 1e-3);
    if (distinct) out.zeros.push_back(c);
  }
  return out;
}

}  // namespace robin3
