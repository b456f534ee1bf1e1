#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "robin3/degree.hpp"

using namespace robin3;
using std::numbers::pi;

namespace {

Vec4 flip(const Vec4& x, int i) {
  Vec4 y = x;
  y[i] = -y[i];
  return y;
}

// quaternion square, degree 2
Vec4 qsquare(const Vec4& x) {
  const double w = x[0];
  const Eigen::Vector3d v = x.tail<3>();
  Vec4 y;
  y[0] = w * w - v.squaredNorm();
  y.tail<3>() = 2 * w * v;
  return y;
}

void check_degree(const SphereMap& m, int expected, int level = 2) {
  const auto r = sphere_degree(m, level, 7);
  CHECK(r.value == expected);
  CHECK(r.value_next == expected);
  CHECK(r.confident());
  CHECK(std::abs(r.regular_value.norm() - 1) < 1e-12);
}

}  // namespace

TEST_CASE("triangulated sphere") {
  const std::array<std::size_t, 5> nv{8, 32, 192, 1408, 11008};
  for (int l = 0; l <= 4; ++l) {
    const auto& tri = TriangulatedSphere::cached(l);
    CHECK(tri.vertices().size() == nv[l]);
    CHECK(tri.cells().size() == (std::size_t(16) << (3 * l)));
  }
  const auto& t3 = TriangulatedSphere::cached(3);
  for (const auto& c : t3.cells()) {
    Eigen::Matrix4d m;
    for (int k = 0; k < 4; ++k) m.col(k) = t3.vertices()[c[k]];
    REQUIRE(m.determinant() > 0);
  }
  CHECK(std::abs(t3.spherical_volume() / (2 * pi * pi) - 1) < 1e-3);
  CHECK(std::abs(TriangulatedSphere::cached(1).spherical_volume() / (2 * pi * pi) - 1) < 5e-2);
  // coarse vertices are a prefix of the refined list
  const auto& t2 = TriangulatedSphere::cached(2);
  for (std::size_t i = 0; i < t2.vertices().size(); ++i) CHECK(t2.vertices()[i] == t3.vertices()[i]);

  // each random direction lies in the cone of exactly one cell
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int s = 0; s < 50; ++s) {
    const Vec4 y(n(rng), n(rng), n(rng), n(rng));
    int hits = 0;
    for (const auto& c : t2.cells()) {
      Eigen::Matrix4d m;
      for (int k = 0; k < 4; ++k) m.col(k) = t2.vertices()[c[k]];
      if ((m.inverse() * y).minCoeff() > 0) ++hits;
    }
    CHECK(hits == 1);
  }
}

TEST_CASE("degrees of elementary maps") {
  check_degree([](const Vec4& x) { return x; }, 1);
  check_degree([](const Vec4& x) { return x; }, 1, 3);
  check_degree([](const Vec4&) { return Vec4(1, 0, 0, 0); }, 0);
  check_degree([](const Vec4&) { return Vec4(1, 0, 0, 0); }, 0, 3);
  check_degree([](const Vec4& x) { return flip(x, 1); }, -1);
  check_degree([](const Vec4& x) { return flip(x, 1); }, -1, 3);
  check_degree([](const Vec4& x) { return Vec4(-x); }, 1);
  check_degree([](const Vec4& x) { return Vec4(-x); }, 1, 3);
  check_degree(qsquare, 2, 3);
  CHECK(sphere_degree(qsquare, 3, 7).preimage_count >= 2);
  CHECK_THROWS_AS(sphere_degree([](const Vec4& x) { return x; }, 7), std::invalid_argument);
  CHECK_THROWS_AS(sphere_degree([](const Vec4&) { return Vec4(Vec4::Zero()); }, 1), DegreeError);
}

TEST_CASE("reflections multiply the degree by -1") {
  const SphereMap synth = refsym_map(11, 0.3);
  for (const SphereMap& base : {SphereMap([](const Vec4& x) { return x; }), synth}) {
    const int d0 = sphere_degree(base, 2, 5).value;
    CHECK(d0 == 1);
    for (int k = 1; k <= 5; ++k) {
      // alternate reflections between range and domain
      const SphereMap m = [&base, k](const Vec4& x) {
        Vec4 y = x;
        for (int j = 1; j < k; j += 2) y = flip(y, j % 4);
        Vec4 z = base(y);
        for (int j = 0; j < k; j += 2) z = flip(z, (j + 2) % 4);
        return z;
      };
      CHECK(sphere_degree(m, 2, 5).value == (k % 2 ? -d0 : d0));
    }
  }
}

TEST_CASE("homotopy invariance") {
  const SphereMap f = refsym_map(1, 0.4), g = refsym_map(2, 0.4);
  for (double s : {0.0, 0.5, 1.0}) {
    const SphereMap h = [&](const Vec4& x) { return Vec4(((1 - s) * f(x) + s * g(x)).normalized()); };
    CHECK(sphere_degree(h, 2, 9).value == 1);
  }
  // reflected family stays at -1 along the path
  for (double s : {0.0, 0.5, 1.0}) {
    const SphereMap h = [&](const Vec4& x) { return flip(((1 - s) * f(x) + s * g(x)).normalized(), 0); };
    CHECK(sphere_degree(h, 2, 9).value == -1);
  }
}

TEST_CASE("reflection-symmetric maps have degree one") {
  const SphereMap id = refsym_map(0, 0.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int s = 0; s < 20; ++s) {
    const Vec4 x = Vec4(n(rng), n(rng), n(rng), n(rng)).normalized();
    CHECK((id(x) - x).norm() < 1e-15);
  }
  CHECK(verify_refsym_degree(0, 2, 0.0).value == 1);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SphereMap phi = refsym_map(seed, 0.2);
    CHECK(refsym_residual(phi, 64, seed) < 1e-10);
    const auto r = verify_refsym_degree(seed, 2, 0.2);
    CHECK(r.value == 1);
    CHECK(r.value_next == 1);
  }
  for (std::uint64_t seed : {3u, 4u}) {
    const auto r = verify_refsym_degree(seed, 3, 0.45);
    CHECK(r.value == 1);
    CHECK(r.confident());
  }
  // the reflected identity breaks the symmetry
  CHECK(refsym_residual([](const Vec4& x) { return flip(x, 1); }, 16, 1) > 0.1);
  CHECK_THROWS_AS(refsym_map(1, 0.5), std::invalid_argument);
}

TEST_CASE("region boundary parametrization") {
  const Region up{Region::Kind::UpperHalfAnnulus};
  const Region lo{Region::Kind::LowerHalfAnnulus};
  const auto& tri = TriangulatedSphere::cached(3);
  double rmin = 1, rmax = 0;
  for (const auto& v : tri.vertices()) {
    const Vec4 p = region_boundary_point(up, v);
    const double r = p.norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    CHECK(p[3] >= 0);
    // on one of the three pieces
    const bool on = std::abs(r - 1) < 1e-12 || std::abs(r - 0.5) < 1e-12 || p[3] == 0.0;
    CHECK(on);
    const Vec4 q = region_boundary_point(lo, v);
    CHECK(q[3] <= 0);
  }
  CHECK(rmin == doctest::Approx(0.5));
  CHECK(rmax == doctest::Approx(1.0));
  CHECK((region_boundary_point(up, Vec4(0, 0, 0, 1)) - Vec4(0, 0, 0, 1)).norm() < 1e-15);
  CHECK((region_boundary_point(up, Vec4(0, 0, 0, -1)) - Vec4(0, 0, 0, 0.5)).norm() < 1e-15);
}

TEST_CASE("degrees on regions") {
  const Region ball{Region::Kind::Ball, 0.5};
  CHECK(region_degree([](const Vec4& x) { return x; }, ball, 2).value == 1);
  CHECK(region_degree([](const Vec4& x) { return Vec4(x + Vec4(2, 0, 0, 0)); }, ball, 2).value == 0);
  CHECK(region_degree([](const Vec4& x) { return Vec4(x - Vec4(0.1, 0.2, -0.1, 0.1)); }, ball, 2).value == 1);
  CHECK(region_degree([](const Vec4& x) { return flip(x, 3); }, ball, 2).value == -1);
  CHECK_THROWS_AS(region_degree([](const Vec4& x) { return Vec4(x - Vec4(0.5, 0, 0, 0)); }, ball, 2), DegreeError);

  const Region up{Region::Kind::UpperHalfAnnulus};
  const Region lo{Region::Kind::LowerHalfAnnulus};
  const Vec4 c(0.1, 0.3, -0.2, 0.5);
  const FieldMap shift = [c](const Vec4& x) { return Vec4(x - c); };
  CHECK(region_degree(shift, up, 2).value == 1);
  CHECK(region_degree(shift, lo, 2).value == 0);
  const FieldMap shift_low = [c](const Vec4& x) { return Vec4(x - flip(c, 3)); };
  CHECK(region_degree(shift_low, up, 2).value == 0);
  CHECK(region_degree(shift_low, lo, 2).value == 1);
  // zero outside both half-annuli
  const FieldMap inner = [](const Vec4& x) { return Vec4(x - Vec4(0, 0.1, 0, 0.1)); };
  CHECK(region_degree(inner, up, 2).value == 0);
  CHECK(region_degree(inner, lo, 2).value == 0);
}

TEST_CASE("half-annuli degrees sum to zero") {
  const std::array<Vec4, 5> zeros{Vec4(0, 0.3, 0, 0.6), Vec4(0, -0.4, 0, 0.5), Vec4(0, 0, 0, 0.75),
                                  Vec4(0, 0.6, 0, 0.3), Vec4(0, -0.2, 0, 0.8)};
  const Region up{Region::Kind::UpperHalfAnnulus};
  const Region lo{Region::Kind::LowerHalfAnnulus};
  for (int i = 0; i < 5; ++i) {
    const FieldMap phi = half_annulus_map(100 + i, zeros[i]);
    // the symmetry holds on all of R^4 minus {b = 0}
    std::mt19937_64 rng(i);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int s = 0; s < 20; ++s) {
      const Vec4 x(u(rng), u(rng), u(rng), u(rng));
      const std::complex<double> q = std::complex<double>(x[2], x[3]) / std::abs(std::complex<double>(x[2], x[3]));
      auto rb = [&](double re, double im) {
        const auto z = -q * q * std::conj(std::complex<double>(re, im));
        return z;
      };
      const auto ra = rb(x[0], x[1]);
      const Vec4 lhs = phi(Vec4(ra.real(), ra.imag(), -x[2], -x[3]));
      const Vec4 px = phi(x);
      const auto c1 = rb(px[0], px[1]), c2 = rb(px[2], px[3]);
      CHECK((lhs - Vec4(c1.real(), c1.imag(), c2.real(), c2.imag())).norm() < 1e-12);
    }
    for (int level : {3, 4}) {
      const auto dp = region_degree(phi, up, level, 3);
      const auto dm = region_degree(phi, lo, level, 3);
      CHECK(dp.value + dm.value == 0);
      CHECK(dp.value == -1);
      CHECK(dp.confident());
      CHECK(dm.confident());
    }
  }
  CHECK_THROWS_AS(half_annulus_map(1, Vec4(0.1, 0.3, 0, 0.6)), std::invalid_argument);
}

TEST_CASE("degree certificate on synthetic fields") {
  // unique zero at a = 0, b = (-1, 0), t = 1/2
  const SphereField v = [](const Vec4& x, double t) {
    const double a2 = x[0] * x[0] + x[1] * x[1];
    return Vec4((1 - t) * x + t * Vec4(x[0], x[1], 1 - a2, 0));
  };
  const auto c = degree_certificate(v, 2, 1e-6);
  CHECK_FALSE(c.zero_located);
  CHECK(c.w0.value == 1);
  CHECK(c.w1.value == 0);
  CHECK(c.certifies_zero());
  const Vec4 z(0, 0, -1, 0);
  CHECK(v(z, 0.5).norm() < 1e-15);

  // nonvanishing, b-independent at t = 1
  const SphereField flat = [](const Vec4& x, double t) {
    return Vec4((1 - t) * x + t * Vec4(x[0], x[1], 1.0, 0.5));
  };
  const auto cf = degree_certificate(flat, 2, 1e-6);
  CHECK(cf.w1.value == 0);

  // vanishing at a vertex is reported directly
  const SphereField hit = [](const Vec4& x, double t) { return Vec4(x - t * Vec4(1, 0, 0, 0)); };
  const auto ch = degree_certificate(hit, 1, 1e-6);
  CHECK(ch.zero_located);
  CHECK(ch.zero_t == 1.0);
  CHECK((ch.zero_point - Vec4(1, 0, 0, 0)).norm() < 1e-15);
  CHECK(ch.certifies_zero());

  const auto cn = degree_certificate(v, 1, 1e-6, 10.0);
  CHECK(cn.indeterminate);
  CHECK_FALSE(cn.certifies_zero());
}

TEST_CASE("degree certificate on z + 0.2 z^2") {
  const auto d = build_domain({cplx(0.2)});
  SolverConfig c;
  c.alpha = 2 * pi;
  c.N = 16;
  c.M = 6;
  const auto s = solve_spectrum(d, c);
  const TrialField f(d, s, default_profile(c.alpha), FoldOrder{6, 8});
  const auto cert = degree_certificate(f, 3, 1e-8);
  REQUIRE_FALSE(cert.zero_located);
  CHECK_FALSE(cert.indeterminate);
  // W_1 factors through the disk of w values
  CHECK(cert.w1.value == 0);
  CHECK(cert.w1.value_next == 0);
  // W_0 varies quickly near b = 0 and is only resolved on the finer level
  CHECK(cert.w0.value_next == 1);
}
