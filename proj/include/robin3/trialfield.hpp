#pragma once

// Trial functions u = v o M_w o G_C o F_C on Phi(D), the orthogonality field
// V = (<u, f_1>, <u, f_*>) and the search for its zeros.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robin3/complexgeo.hpp"
#include "robin3/diskspec.hpp"
#include "robin3/robinsolver.hpp"

namespace robin3 {

using cplx = std::complex<double>;

struct TrialParams {
  MoebiusParam<> w{cplx(0.0)};
  CapParams<> cap{cplx(1.0), 1.0};
};

/// Point of S^3 in C^2 together with the cap parameter t.
struct SphereParam {
  cplx a;
  cplx b;
  double t = 1.0;

  Eigen::Vector4d vec() const { return {a.real(), a.imag(), b.real(), b.imag()}; }
  static SphereParam from_vec(const Eigen::Vector4d& x, double t) { return {cplx(x[0], x[1]), cplx(x[2], x[3]), t}; }
};

struct VectorFieldValue {
  cplx inner1;
  cplx inner2;
  double quadrature_error = 0.0;  // two-level difference, when requested

  Eigen::Vector4d vec() const { return {inner1.real(), inner1.imag(), inner2.real(), inner2.imag()}; }
  double norm() const { return vec().norm(); }
};

struct RayleighBreakdown {
  double dirichlet = 0.0;
  double boundary_term = 0.0;
  double mass = 0.0;
  double quotient = 0.0;
};

/// Disk profile used by the trial function: beta = alpha / (4 pi).
RadialProfile default_profile(double alpha);

/// v(M_w(G_C(F_C(zeta)))) for t < 1, v(M_w(zeta)) for t = 1.
cplx trial_eval(const TrialParams& params, const RadialProfile& profile, cplx zeta);

/// a = sqrt(2 - |w|^2) w, b = (1 - |w|^2) p.
SphereParam psi(const MoebiusParam<>& w, cplx p, double t = 1.0);

/// Inverse chart. p is empty when b = 0 (|w| = 1); throws if b = 0 but |a| != 1.
std::pair<MoebiusParam<>, std::optional<cplx>> psi_inverse(const SphereParam& sp);

/// Quadrature sizes for the fold-aware rule: Gauss points per radial panel and
/// per angular panel.
struct FoldOrder {
  int radial = 12;
  int angular = 10;
};

/// Nodes for integrals over D split along the fold of one cap.  Both halves are
/// pulled back to the half-disk {Re(conj(p) eta) > 0} by M_{-pt}; the half C*
/// is reached through R_p.  Values of f_1, f_* and |Phi'|^2 are folded into the
/// node weights, so a trial function only needs evaluating once per node.
class FoldQuadrature {
 public:
  FoldQuadrature(const CapParams<>& cap, const DomainSpec& domain, const SpectrumResult& spectrum,
                 FoldOrder order = {});

  const CapParams<>& cap() const { return cap_; }
  std::size_t size() const { return inner_.size(); }

  /// G_C(M_{-pt}(eta)) at each node (identity points when t = 1).
  const std::vector<cplx>& inner_points() const { return inner_; }

  /// Integrals of h f_1, h f_*, |h|^2 over Omega given h at the inner points.
  VectorFieldValue field(const std::vector<cplx>& h) const;
  double mass(const std::vector<cplx>& h) const;
  /// Same rule applied to the weights alone: integral of f_1 over Omega.
  double integral_f1() const { return sum_f1_; }
  double area() const { return sum_mass_; }

 private:
  CapParams<> cap_;
  std::vector<cplx> inner_;
  std::vector<double> w1_, wstar_, wmass_;
  double sum_f1_ = 0.0;
  double sum_mass_ = 0.0;
};

class TrialField {
 public:
  TrialField(const DomainSpec& domain, const SpectrumResult& spectrum, RadialProfile profile, FoldOrder order = {});

  const DomainSpec& domain() const { return *domain_; }
  const SpectrumResult& spectrum() const { return *spectrum_; }
  const RadialProfile& profile() const { return profile_; }
  const FoldOrder& order() const { return order_; }

  VectorFieldValue value(const TrialParams& params) const;
  VectorFieldValue value(const TrialParams& params, const FoldQuadrature& quad) const;
  /// Value plus the difference against a rule with doubled orders.
  VectorFieldValue value_checked(const TrialParams& params) const;

  /// V~(a, b, t) = V(w(a), p(b), t); for b = 0 the boundary value.
  VectorFieldValue sphere_value(const SphereParam& sp) const;

  /// |V| / (max g * A^{1/2} * max(|f_1|, |f_*|)).
  double scaled(const VectorFieldValue& v) const;

  RayleighBreakdown rayleigh(const TrialParams& params) const;

  std::vector<cplx> trial_values(const TrialParams& params, const FoldQuadrature& quad) const;

 private:
  const DomainSpec* domain_;
  const SpectrumResult* spectrum_;
  RadialProfile profile_;
  FoldOrder order_;
};

struct SearchConfig {
  double tolerance = 1e-7;
  int starts = 6;
  int max_iterations = 60;
  FoldOrder scan_order{6, 8};
  FoldOrder order{};
  int jobs = 1;
};

struct ZeroCandidate {
  SphereParam params;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  MoebiusParam<> w() const { return psi_inverse(params).first; }
  cplx p() const;
  std::string case_tag() const { return params.t >= 1.0 ? "t=1" : "t<1"; }
  TrialParams trial() const;
};

struct SearchResult {
  ZeroCandidate best;
  std::vector<ZeroCandidate> zeros;  // distinct converged zeros
};

/// Coarse scan over (w, p, t), then damped Newton from the best starts.
SearchResult find_zero(const TrialField& field, const SearchConfig& config = {});

}  // namespace robin3
