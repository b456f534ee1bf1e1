#include "robin3/degree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

namespace robin3 {

namespace {

using Mat4 = Eigen::Matrix4d;
using std::numbers::pi;

constexpr int kMaxLevel = 7;

double det4(const std::vector<Vec4>& pts, const std::array<int, 4>& c) {
  Mat4 m;
  for (int k = 0; k < 4; ++k) m.col(k) = pts[c[k]];
  return m.determinant();
}

void orient(const std::vector<Vec4>& pts, std::array<int, 4>& c) {
  if (det4(pts, c) < 0) std::swap(c[2], c[3]);
}

// S = diag(-1, 1, -1, 1) is R_b x R_b for real b.
Vec4 reflect_pair(const std::complex<double>& b, const Vec4& x) {
  const std::complex<double> q = b / std::abs(b);
  const std::complex<double> s = -q * q;
  const std::complex<double> c = s * std::conj(std::complex<double>(x[0], x[1]));
  const std::complex<double> d = s * std::conj(std::complex<double>(x[2], x[3]));
  return {c.real(), c.imag(), d.real(), d.imag()};
}

// phi on b_2 < 0 from h on b_2 >= 0.
FieldMap extend_by_symmetry(FieldMap h) {
  return [h = std::move(h)](const Vec4& x) -> Vec4 {
    if (x[3] >= 0) return h(x);
    const std::complex<double> b(x[2], x[3]);
    Vec4 y = reflect_pair(b, x);
    y[2] = -x[2];
    y[3] = -x[3];
    return reflect_pair(b, h(y));
  };
}

// Monomials of degree <= 2 invariant under S.
std::array<double, 9> invariant_monomials(const Vec4& x) {
  return {1.0, x[1], x[3], x[0] * x[0], x[2] * x[2], x[0] * x[2], x[1] * x[1], x[3] * x[3], x[1] * x[3]};
}

// P(S x) = S P(x) and |P| <= 1 on the unit ball.
FieldMap equivariant_perturbation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::array<std::array<double, 9>, 4> coef{};
  for (auto& q : coef) {
    double l1 = 0;
    for (double& c : q) {
      c = unif(rng);
      l1 += std::abs(c);
    }
    for (double& c : q) c /= 2 * l1;
  }
  return [coef](const Vec4& x) -> Vec4 {
    const auto m = invariant_monomials(x);
    Vec4 q;
    for (int i = 0; i < 4; ++i) {
      q[i] = 0;
      for (int k = 0; k < 9; ++k) q[i] += coef[i][k] * m[k];
    }
    return {x[0] * q[0], q[1], x[2] * q[2], q[3]};
  };
}

Vec4 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec4 y;
  for (int k = 0; k < 4; ++k) y[k] = n(rng);
  return y.normalized();
}

struct Count {
  int value = 0;
  int preimages = 0;
  double margin = std::numeric_limits<double>::infinity();
  bool regular = true;
};

Count count_preimages(const TriangulatedSphere& tri, const std::vector<Vec4>& img, const Vec4& y) {
  constexpr double kEdge = 1e-8;
  Count out;
  Mat4 m;
  for (const auto& c : tri.cells()) {
    for (int k = 0; k < 4; ++k) m.col(k) = img[c[k]];
    // a positive combination equal to y needs some image with y . y_k > 0
    if ((m.transpose() * y).maxCoeff() <= 0) continue;
    const double det = m.determinant();
    // degenerate images (rounding-level volume) miss a generic target
    if (std::abs(det) < 1e-14) continue;
    const Mat4 inv = m.inverse();
    const Eigen::Vector4d lam = inv * y;
    if (!lam.allFinite()) continue;
    // signed distance of y from the hyperplane through the other three images
    const double lo = (lam.array() / inv.rowwise().norm().array()).minCoeff();
    if (lo < -kEdge) continue;
    if (lo <= kEdge) {
      out.regular = false;
      return out;
    }
    out.value += det > 0 ? 1 : -1;
    ++out.preimages;
    out.margin = std::min(out.margin, std::abs(det));
  }
  if (out.preimages == 0) out.margin = 0.0;
  return out;
}

DegreeResult degree_on_images(const std::vector<Vec4>& fine_images, int level, std::uint64_t seed) {
  const auto& coarse = TriangulatedSphere::cached(level);
  const auto& fine = TriangulatedSphere::cached(level + 1);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt <= 16; ++attempt) {
    const Vec4 y = random_unit(rng);
    const Count a = count_preimages(coarse, fine_images, y);
    if (!a.regular) continue;
    const Count b = count_preimages(fine, fine_images, y);
    if (!b.regular) continue;
    DegreeResult r;
    r.level = level;
    r.value = a.value;
    r.value_next = b.value;
    r.regular_value = y;
    r.preimage_count = a.preimages;
    r.min_jacobian_margin = a.margin;
    r.levels_agreeing = a.value == b.value ? 2 : 1;
    return r;
  }
  throw DegreeError("no regular value found after 16 redraws");
}

std::vector<Vec4> images_on(const TriangulatedSphere& tri, const SphereMap& map, double min_norm) {
  std::vector<Vec4> img;
  img.reserve(tri.vertices().size());
  for (const auto& v : tri.vertices()) {
    const Vec4 y = map(v);
    const double n = y.norm();
    if (!(n > min_norm)) throw DegreeError("map vanishes at a sample point");
    img.push_back(y / n);
  }
  return img;
}

void check_level(int level) {
  if (level < 0 || level + 1 > kMaxLevel) throw std::invalid_argument("degree level must be in [0, 6]");
}

}  // namespace

TriangulatedSphere::TriangulatedSphere(int level) : level_(level) {
  if (level < 0 || level > kMaxLevel) throw std::invalid_argument("triangulation level out of range");
  for (int i = 0; i < 4; ++i)
    for (double s : {1.0, -1.0}) {
      Vec4 e = Vec4::Zero();
      e[i] = s;
      vertices_.push_back(e);
    }
  for (int mask = 0; mask < 16; ++mask) {
    std::array<int, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = 2 * i + ((mask >> i) & 1);
    orient(vertices_, c);
    cells_.push_back(c);
  }
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      vertices_.push_back((vertices_[a] + vertices_[b]).normalized());
      const int idx = static_cast<int>(vertices_.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 4>> next;
    next.reserve(cells_.size() * 8);
    for (const auto& c : cells_) {
      const int v0 = c[0], v1 = c[1], v2 = c[2], v3 = c[3];
      const int m01 = midpoint(v0, v1), m02 = midpoint(v0, v2), m03 = midpoint(v0, v3);
      const int m12 = midpoint(v1, v2), m13 = midpoint(v1, v3), m23 = midpoint(v2, v3);
      const std::array<std::array<int, 4>, 8> kids{{{v0, m01, m02, m03},
                                                    {m01, v1, m12, m13},
                                                    {m02, m12, v2, m23},
                                                    {m03, m13, m23, v3},
                                                    {m01, m02, m03, m13},
                                                    {m01, m02, m12, m13},
                                                    {m02, m03, m13, m23},
                                                    {m02, m12, m13, m23}}};
      for (auto k : kids) {
        orient(vertices_, k);
        next.push_back(k);
      }
    }
    cells_ = std::move(next);
  }
}

const TriangulatedSphere& TriangulatedSphere::cached(int level) {
  static std::mutex mu;
  static std::array<std::unique_ptr<TriangulatedSphere>, kMaxLevel + 1> cache;
  if (level < 0 || level > kMaxLevel) throw std::invalid_argument("triangulation level out of range");
  std::lock_guard<std::mutex> lock(mu);
  if (!cache[level]) cache[level] = std::make_unique<TriangulatedSphere>(level);
  return *cache[level];
}

double TriangulatedSphere::spherical_volume() const {
  // radial projection: d sigma = (x . n) / |x|^4 dV on the flat cell
  constexpr double a = 0.5854101966249685, b = 0.1381966011250105;
  double total = 0;
  for (const auto& c : cells_) {
    const Vec4 &v0 = vertices_[c[0]], &v1 = vertices_[c[1]], &v2 = vertices_[c[2]], &v3 = vertices_[c[3]];
    const double hv = std::abs(det4(vertices_, c)) / 6.0;  // height times 3-volume
    const std::array<Vec4, 4> q{a * v0 + b * (v1 + v2 + v3), a * v1 + b * (v0 + v2 + v3), a * v2 + b * (v0 + v1 + v3),
                                a * v3 + b * (v0 + v1 + v2)};
    double s = 0;
    for (const auto& x : q) s += 1.0 / std::pow(x.squaredNorm(), 2);
    total += hv * s / 4.0;
  }
  return total;
}

DegreeResult sphere_degree(const SphereMap& map, int level, std::uint64_t seed) {
  check_level(level);
  return degree_on_images(images_on(TriangulatedSphere::cached(level + 1), map, 1e-300), level, seed);
}

double refsym_residual(const SphereMap& map, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    const Vec4 x = random_unit(rng);
    const std::complex<double> b(x[2], x[3]);
    Vec4 y = reflect_pair(b, x);
    y[2] = -x[2];
    y[3] = -x[3];
    worst = std::max(worst, (map(y) - reflect_pair(b, map(x))).norm());
  }
  for (int s = 0; s < samples; ++s) {
    Vec4 x = random_unit(rng);
    x[2] = x[3] = 0;
    x.normalize();
    worst = std::max(worst, (map(x) - x).norm());
  }
  return worst;
}

SphereMap refsym_map(std::uint64_t seed, double amplitude) {
  if (!(amplitude >= 0 && amplitude < 0.5)) throw std::invalid_argument("amplitude must be in [0, 0.5)");
  FieldMap p = equivariant_perturbation(seed);
  FieldMap h = [p, amplitude](const Vec4& x) -> Vec4 {
    const double b2 = x[2] * x[2] + x[3] * x[3];
    return (x + amplitude * b2 * p(x)).normalized();
  };
  return extend_by_symmetry(std::move(h));
}

DegreeResult verify_refsym_degree(std::uint64_t seed, int level, double amplitude) {
  const SphereMap phi = refsym_map(seed, amplitude);
  const double res = refsym_residual(phi, 64, seed ^ 0x5bd1e995u);
  if (res >= 1e-10) throw DegreeError("synthetic map fails the reflection symmetry check");
  return sphere_degree(phi, level, seed);
}

Vec4 region_boundary_point(const Region& region, const Vec4& x) {
  switch (region.kind) {
    case Region::Kind::Ball:
      return region.radius * x;
    case Region::Kind::LowerHalfAnnulus: {
      Vec4 y = x;
      y[0] = -y[0];
      Vec4 z = region_boundary_point({Region::Kind::UpperHalfAnnulus, region.radius}, y);
      z[3] = -z[3];
      return z;
    }
    case Region::Kind::UpperHalfAnnulus:
      break;
  }
  // meridian curve from (0,0,0,1) to (0,0,0,1/2): outer quarter arc, flat
  // segment on b_2 = 0, inner quarter arc; arclength proportional to the polar angle
  const double outer = pi / 2, flat = 0.5, inner = pi / 4;
  const Eigen::Vector3d u3 = x.head<3>();
  const double r = u3.norm();
  const Eigen::Vector3d u = r > 0 ? Eigen::Vector3d(u3 / r) : Eigen::Vector3d::UnitX();
  const double psi = std::atan2(r, x[3]);
  const double s = psi / pi * (outer + flat + inner);
  double rho, eta;
  if (s <= outer) {
    rho = std::sin(s);
    eta = std::cos(s);
  } else if (s <= outer + flat) {
    rho = 1.0 - (s - outer);
    eta = 0.0;
  } else {
    const double ang = std::min((s - outer - flat) / 0.5, pi / 2);
    rho = 0.5 * std::cos(ang);
    eta = 0.5 * std::sin(ang);
  }
  Vec4 out;
  out.head<3>() = rho * u;
  out[3] = eta;
  return out;
}

DegreeResult region_degree(const FieldMap& phi, const Region& region, int level, std::uint64_t seed) {
  check_level(level);
  if (region.kind == Region::Kind::Ball && !(region.radius > 0)) throw std::invalid_argument("ball radius must be positive");
  const SphereMap m = [&](const Vec4& x) { return phi(region_boundary_point(region, x)); };
  return degree_on_images(images_on(TriangulatedSphere::cached(level + 1), m, 1e-6), level, seed);
}

FieldMap half_annulus_map(std::uint64_t seed, const Vec4& zero, double amplitude) {
  if (zero[0] != 0.0 || zero[2] != 0.0 || !(zero[3] > 0))
    throw std::invalid_argument("zero must have a_1 = b_1 = 0 and b_2 > 0");
  FieldMap p = equivariant_perturbation(seed);
  const double c4 = zero[3] * zero[3];
  FieldMap h = [p, zero, c4, amplitude](const Vec4& x) -> Vec4 {
    const double b2 = x[2] * x[2] + x[3] * x[3];
    return x - (b2 / c4) * zero + amplitude * b2 * p(x);
  };
  return extend_by_symmetry(std::move(h));
}

Certificate degree_certificate(const SphereField& field, int level, double threshold, double noise,
                               std::uint64_t seed) {
  check_level(level);
  const auto& tri = TriangulatedSphere::cached(level + 1);
  Certificate out;
  std::array<std::vector<Vec4>, 2> img;
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const double t = k;
    img[k].reserve(tri.vertices().size());
    for (const auto& v : tri.vertices()) {
      const Vec4 y = field(v, t);
      const double n = y.norm();
      if (n < smallest) {
        smallest = n;
        out.zero_point = v;
        out.zero_t = t;
      }
      img[k].push_back(n > 0 ? Vec4(y / n) : Vec4::Zero());
    }
  }
  if (smallest < threshold) {
    out.zero_located = true;
    return out;
  }
  out.indeterminate = smallest < noise;
  out.w0 = degree_on_images(img[0], level, seed);
  out.w1 = degree_on_images(img[1], level, seed);
  return out;
}

SphereField trial_sphere_field(const TrialField& field) {
  return [&field](const Vec4& x, double t) { return field.sphere_value(SphereParam::from_vec(x, t)).vec(); };
}

Certificate degree_certificate(const TrialField& field, int level, double threshold, std::uint64_t seed) {
  Certificate out = degree_certificate(trial_sphere_field(field), level, threshold, 0.0, seed);
  if (!out.zero_located) {
    ZeroCandidate at;
    at.params = SphereParam::from_vec(out.zero_point, out.zero_t);
    const auto v = field.value_checked(at.trial());
    out.indeterminate = v.norm() < 10 * v.quadrature_error;
  }
  return out;
}

}  // namespace robin3
