#pragma once

// Map algebra on the closed unit disk: Moebius self-maps, line reflections,
// hyperbolic caps with their reflections and fold maps, and the cap map that
// opens a cap conformally onto the disk.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace robin3 {

template <typename T>
using Complex = std::complex<T>;

/// Moebius parameter w with |w| <= 1.  |w| == 1 gives the constant map.
template <typename T = double>
class MoebiusParam {
 public:
  MoebiusParam() = default;
  explicit MoebiusParam(Complex<T> w) : w_(w) {
    if (!(std::abs(w) <= T(1) + T(1e-14)))
      throw std::invalid_argument("MoebiusParam: |w| exceeds 1");
  }

  Complex<T> value() const { return w_; }
  bool interior() const { return std::abs(w_) < T(1); }
  bool on_boundary() const { return !interior(); }

 private:
  Complex<T> w_{0};
};

/// Unit direction p; the reflection R_p fixes the line i*p*R and sends p to -p.
template <typename T = double>
class ReflectionAxis {
 public:
  ReflectionAxis() = default;
  explicit ReflectionAxis(Complex<T> p) : p_(p) {
    if (std::abs(std::abs(p) - T(1)) > T(1e-14))
      throw std::invalid_argument("ReflectionAxis: direction is not a unit complex number");
  }

  /// R_b for an arbitrary nonzero b uses the direction b/|b|.
  static ReflectionAxis from_vector(Complex<T> b) {
    const T n = std::abs(b);
    if (n == T(0)) throw std::invalid_argument("ReflectionAxis: zero vector has no direction");
    ReflectionAxis axis;
    axis.p_ = b / n;
    return axis;
  }

  Complex<T> direction() const { return p_; }

 private:
  Complex<T> p_{1};
};

template <typename T = double>
struct CapParams {
  Complex<T> p{1};
  T t{0};

  CapParams() = default;
  CapParams(Complex<T> dir, T tt) : p(dir), t(tt) {
    if (std::abs(std::abs(dir) - T(1)) > T(1e-12))
      throw std::invalid_argument("CapParams: direction is not a unit complex number");
    if (!(tt >= T(0) && tt <= T(1))) throw std::invalid_argument("CapParams: t outside [0,1]");
  }

  bool degenerate() const { return t >= T(1); }
};

template <typename T = double>
struct CapGeometry {
  Complex<T> corner_minus;
  Complex<T> corner_plus;
  Complex<T> pole;
  Complex<T> geodesic_center;
  /// +infinity when the geodesic is the diameter (t == 0).
  T geodesic_radius;

  bool geodesic_is_diameter() const { return std::isinf(geodesic_radius); }
};

inline constexpr double kGeodesicSlack = 1e-12;

// ---------------------------------------------------------------------------
// Moebius maps and reflections
// ---------------------------------------------------------------------------

/// M_w(z) = (z + w) / (z conj(w) + 1).  Constant w when |w| == 1.
template <typename T>
Complex<T> moebius_apply(const Complex<T>& w, const Complex<T>& z) {
  if (std::abs(w) >= T(1)) return w;
  const Complex<T> den = z * std::conj(w) + T(1);
  if (std::abs(den) < T(1e-15)) throw std::domain_error("moebius_apply: vanishing denominator");
  return (z + w) / den;
}

template <typename T>
Complex<T> moebius_apply(const MoebiusParam<T>& w, const Complex<T>& z) {
  return moebius_apply(w.value(), z);
}

/// Derivative of M_w at z; |M_w'(z)|^2 is the area Jacobian.
template <typename T>
Complex<T> moebius_derivative(const Complex<T>& w, const Complex<T>& z) {
  const Complex<T> den = z * std::conj(w) + T(1);
  return (T(1) - std::norm(w)) / (den * den);
}

template <typename T>
MoebiusParam<T> moebius_inverse(const MoebiusParam<T>& w) {
  if (!w.interior()) throw std::domain_error("moebius_inverse: constant map is not invertible");
  return MoebiusParam<T>(-w.value());
}

/// R_p(z) = -p^2 conj(z).
template <typename T>
Complex<T> reflect(const Complex<T>& p, const Complex<T>& z) {
  return -(p * p) * std::conj(z);
}

template <typename T>
Complex<T> reflect(const ReflectionAxis<T>& axis, const Complex<T>& z) {
  return reflect(axis.direction(), z);
}

/// |M_{R_p(w)}(z) - (R_p o M_w o R_p)(z)|.
template <typename T>
T conjugation_identity_residual(const ReflectionAxis<T>& axis, const MoebiusParam<T>& w,
                                const Complex<T>& z) {
  const Complex<T> p = axis.direction();
  const Complex<T> lhs = moebius_apply(reflect(p, w.value()), z);
  const Complex<T> rhs = reflect(p, moebius_apply(w.value(), reflect(p, z)));
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Hyperbolic caps
// ---------------------------------------------------------------------------

template <typename T>
CapGeometry<T> cap_geometry(const CapParams<T>& cap) {
  if (cap.degenerate()) throw std::domain_error("cap_geometry: t >= 1 is the degenerate whole-disk cap");
  const Complex<T> p = cap.p;
  const Complex<T> shift = -p * cap.t;
  const Complex<T> ip = Complex<T>(0, 1) * p;
  CapGeometry<T> g;
  g.corner_minus = moebius_apply(shift, -ip);
  g.corner_plus = moebius_apply(shift, ip);
  g.pole = p;
  if (cap.t == T(0)) {
    g.geodesic_center = Complex<T>(0);
    g.geodesic_radius = std::numeric_limits<T>::infinity();
  } else {
    g.geodesic_center = -p * ((T(1) + cap.t * cap.t) / (T(2) * cap.t));
    g.geodesic_radius = (T(1) - cap.t * cap.t) / (T(2) * cap.t);
  }
  return g;
}

/// Signed position relative to the geodesic: >= 0 inside the cap.
template <typename T>
T cap_side(const CapParams<T>& cap, const Complex<T>& z) {
  return std::real(std::conj(cap.p) * moebius_apply(Complex<T>(cap.p * cap.t), z));
}

template <typename T>
bool cap_contains(const CapParams<T>& cap, const Complex<T>& z) {
  if (cap.degenerate()) return true;
  return cap_side(cap, z) >= -T(kGeodesicSlack);
}

/// tau_C = M_{-pt} o R_p o M_{pt}.
template <typename T>
Complex<T> hyperbolic_reflect(const CapParams<T>& cap, const Complex<T>& z) {
  if (cap.degenerate()) throw std::domain_error("hyperbolic_reflect: t >= 1");
  const Complex<T> s = cap.p * cap.t;
  return moebius_apply(Complex<T>(-s), reflect(cap.p, moebius_apply(s, z)));
}

template <typename T>
Complex<T> fold(const CapParams<T>& cap, const Complex<T>& z) {
  if (cap.degenerate()) return z;
  return cap_contains(cap, z) ? z : hyperbolic_reflect(cap, z);
}

/// Conformal map from the cap onto the disk fixing the pole p and the two
/// points +-ip of the unit circle.  At t == 0 those are the corners.
///
/// The lune is opened by zeta -> (zeta - c+)/(zeta - c-) into a quarter plane,
/// rotated onto the first quadrant, squared onto the upper half-plane and sent
/// to the disk by the Moebius map matching the three normalization points.
/// The composition is a degree-two rational map; its coefficients are
/// computed once per cap and everything is kept in homogeneous coordinates so
/// the corners need no special casing.
template <typename T = double>
class CapMap {
 public:
  explicit CapMap(const CapParams<T>& cap) : cap_(cap) {
    if (cap.degenerate()) throw std::domain_error("CapMap: t >= 1 (use the identity limit)");
    const CapGeometry<T> g = cap_geometry(cap);
    cm_ = g.corner_minus;
    cp_ = g.corner_plus;
    const Complex<T> arc_ray = (cap.p - cp_) / (cap.p - cm_);
    const Complex<T> mid = -cap.p * cap.t;
    const Complex<T> geo_ray = (mid - cp_) / (mid - cm_);
    // The image of the cap is the quarter plane between the arc ray and the
    // geodesic ray; rotate its first edge onto the positive real axis.
    const T turn = std::arg(geo_ray / arc_ray);
    const Complex<T> edge = turn > 0 ? arc_ray : geo_ray;
    rot2_ = std::conj(edge * edge) / std::norm(edge);

    const Complex<T> ip = Complex<T>(0, 1) * cap.p;
    const Complex<T> fixed[3] = {-ip, cap.p, ip};
    Hom src[3];
    for (int i = 0; i < 3; ++i) src[i] = squared(fixed[i]);
    // A sends the three half-plane images to (0, 1, inf), B the disk points.
    const Mat a = to_zero_one_inf(src[0], src[1], src[2]);
    const Mat b = to_zero_one_inf(Hom{fixed[0], T(1)}, Hom{fixed[1], T(1)}, Hom{fixed[2], T(1)});
    // coef = B^{-1} A
    const Complex<T> det = b[0] * b[3] - b[1] * b[2];
    const Mat binv = {b[3] / det, -b[1] / det, -b[2] / det, b[0] / det};
    coef_ = {binv[0] * a[0] + binv[1] * a[2], binv[0] * a[1] + binv[1] * a[3],
             binv[2] * a[0] + binv[3] * a[2], binv[2] * a[1] + binv[3] * a[3]};
  }

  Complex<T> operator()(const Complex<T>& zeta) const {
    const Hom s = squared(zeta);
    return (coef_[0] * s.x + coef_[1] * s.y) / (coef_[2] * s.x + coef_[3] * s.y);
  }

  /// Complex derivative of the cap map.
  Complex<T> derivative(const Complex<T>& zeta) const {
    const Hom s = squared(zeta);
    const Complex<T> dx = T(2) * rot2_ * (zeta - cp_);
    const Complex<T> dy = T(2) * (zeta - cm_);
    const Complex<T> num = coef_[0] * s.x + coef_[1] * s.y;
    const Complex<T> den = coef_[2] * s.x + coef_[3] * s.y;
    const Complex<T> dnum = coef_[0] * dx + coef_[1] * dy;
    const Complex<T> dden = coef_[2] * dx + coef_[3] * dy;
    return (dnum * den - num * dden) / (den * den);
  }

  const CapParams<T>& cap() const { return cap_; }

 private:
  struct Hom {
    Complex<T> x, y;
  };
  using Mat = std::array<Complex<T>, 4>;

  // Homogeneous image of zeta under opening, rotation and squaring.
  Hom squared(const Complex<T>& zeta) const {
    const Complex<T> u = zeta - cp_;
    const Complex<T> v = zeta - cm_;
    return {rot2_ * u * u, v * v};
  }

  static Complex<T> bracket(const Hom& p, const Hom& q) { return p.x * q.y - p.y * q.x; }

  static Mat to_zero_one_inf(const Hom& p1, const Hom& p2, const Hom& p3) {
    const Complex<T> d23 = bracket(p2, p3);
    const Complex<T> d21 = bracket(p2, p1);
    return {p1.y * d23, -p1.x * d23, p3.y * d21, -p3.x * d21};
  }

  CapParams<T> cap_;
  Complex<T> cm_, cp_, rot2_;
  Mat coef_{};
};

template <typename T>
Complex<T> cap_map(const CapParams<T>& cap, const Complex<T>& z) {
  if (cap.degenerate()) throw std::domain_error("cap_map: t >= 1 (use the identity limit)");
  if (!cap_contains(cap, z)) throw std::domain_error("cap_map: point outside the cap");
  return CapMap<T>(cap)(z);
}

/// |G_{C_{-b,0}}(z) - (R_b o G_{C_{b,0}} o R_b)(z)| for half-disk caps.
template <typename T>
T cap_map_equivariance_residual(const Complex<T>& b, const Complex<T>& z) {
  const Complex<T> u = b / std::abs(b);
  const CapMap<T> minus(CapParams<T>(-u, T(0)));
  const CapMap<T> plus(CapParams<T>(u, T(0)));
  return std::abs(minus(z) - reflect(u, plus(reflect(u, z))));
}

}  // namespace robin3
