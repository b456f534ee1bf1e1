#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "robin3/trialfield.hpp"

using namespace robin3;
using C = std::complex<double>;
using std::numbers::pi;

namespace {

SolverConfig small_config(double alpha) {
  SolverConfig c;
  c.alpha = alpha;
  c.N = 16;
  c.M = 6;
  return c;
}

struct Fixture {
  DomainSpec domain;
  SpectrumResult spectrum;
  TrialField field;

  Fixture(std::vector<C> coeffs, double alpha, SolverConfig cfg)
      : domain(build_domain(std::move(coeffs))),
        spectrum(solve_spectrum(domain, (cfg.alpha = alpha, cfg))),
        field(domain, spectrum, default_profile(alpha)) {}
};

Eigen::Vector4d random_sphere(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Vector4d x;
  for (int k = 0; k < 4; ++k) x[k] = n(rng);
  return x.normalized();
}

// Brute-force integral of u f over Omega on a polar midpoint grid in disk
// coordinates; uses only trial_eval and point evaluation of f.
VectorFieldValue brute_force(const TrialParams& tp, const Fixture& fx, int nr, int nt) {
  const DiskBasis basis(fx.spectrum.config.N, fx.spectrum.config.M);
  VectorFieldValue v;
  for (int a = 0; a < nr; ++a)
    for (int t = 0; t < nt; ++t) {
      const double r = (a + 0.5) / nr;
      const C z = std::polar(r, 2 * pi * (t + 0.5) / nt);
      const Eigen::VectorXd phi = basis.eval(z);
      const double w = r / nr * 2 * pi / nt * std::norm(fx.domain.phi_prime(z));
      const C u = trial_eval(tp, fx.field.profile(), z);
      v.inner1 += u * fx.spectrum.eigvecs.col(0).dot(phi) * w;
      v.inner2 += u * fx.spectrum.fstar.dot(phi) * w;
    }
  return v;
}

}  // namespace

TEST_CASE("psi chart") {
  const auto s0 = psi(MoebiusParam<>(C(0)), C(0, 1));
  CHECK(s0.a == C(0));
  CHECK(s0.b == C(0, 1));
  const auto s1 = psi(MoebiusParam<>(C(0.6)), C(1));
  CHECK(s1.a.real() == doctest::Approx(0.6 * std::sqrt(1.64)).epsilon(1e-15));
  CHECK(s1.a.real() == doctest::Approx(0.768375).epsilon(1e-6));
  CHECK(s1.b.real() == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(std::abs(std::norm(s1.a) + std::norm(s1.b) - 1.0) < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0, sphere = 0;
  for (int i = 0; i < 1000; ++i) {
    const C w = std::polar(0.999 * std::sqrt(u(rng)), 2 * pi * u(rng));
    const C p = std::polar(1.0, 2 * pi * u(rng));
    const auto sp = psi(MoebiusParam<>(w), p);
    sphere = std::max(sphere, std::abs(std::norm(sp.a) + std::norm(sp.b) - 1.0));
    const auto [w2, p2] = psi_inverse(sp);
    REQUIRE(p2.has_value());
    worst = std::max(worst, std::abs(w2.value() - w) + std::abs(*p2 - p));
  }
  CHECK(worst < 1e-13);
  CHECK(sphere < 1e-12);

  const auto [wb, pb] = psi_inverse(SphereParam{std::polar(1.0, 0.4), C(0), 0.5});
  CHECK_FALSE(pb.has_value());
  CHECK(std::abs(wb.value() - std::polar(1.0, 0.4)) < 1e-15);
  CHECK_THROWS_AS(psi_inverse(SphereParam{C(0.5), C(0), 0.5}), std::invalid_argument);
}

TEST_CASE("trial_eval") {
  const RadialProfile prof(disk_lambda2(0.5));
  const TrialParams id{MoebiusParam<>(C(0)), CapParams<>(C(1), 1.0)};
  CHECK(trial_eval(id, prof, C(0.3, -0.2)) == prof.v(C(0.3, -0.2)));

  const TrialParams half{MoebiusParam<>(C(0)), CapParams<>(C(1), 0.0)};
  CHECK(std::abs(trial_eval(half, prof, C(-0.5)) - prof.v(cap_map(CapParams<>(C(1), 0.0), C(0.5)))) < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const TrialParams bd{MoebiusParam<>(std::polar(1.0, 2 * pi * u(rng))), CapParams<>(std::polar(1.0, 2 * pi * u(rng)), u(rng))};
    const C z = std::polar(std::sqrt(u(rng)), 2 * pi * u(rng));
    CHECK(std::abs(trial_eval(bd, prof, z) - prof.g(1.0) * bd.w.value()) < 1e-14);
    const TrialParams in{MoebiusParam<>(std::polar(0.9 * u(rng), 2 * pi * u(rng))), bd.cap};
    CHECK(std::abs(trial_eval(in, prof, z)) <= prof.g_max() + 1e-12);
  }
}

TEST_CASE("fold quadrature against brute force") {
  const Fixture fx({C(0.2, 0.1), C(0.05, -0.08)}, 2.0, small_config(2.0));
  for (double t : {0.0, 0.6, 1.0}) {
    const TrialParams tp{MoebiusParam<>(C(0.2, -0.3)), CapParams<>(std::polar(1.0, 2.2), t)};
    const FoldQuadrature quad(tp.cap, fx.domain, fx.spectrum);
    CHECK(quad.area() == doctest::Approx(fx.domain.area).epsilon(1e-12));
    CHECK(quad.integral_f1() == doctest::Approx(fx.spectrum.mean_f1).epsilon(1e-10));
    const auto v = fx.field.value(tp, quad);
    const auto bf = brute_force(tp, fx, 600, 600);
    CHECK((v.vec() - bf.vec()).norm() < 2e-4 * v.norm());
    const auto vc = fx.field.value_checked(tp);
    CHECK(vc.quadrature_error < 1e-8 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("boundary values of V") {
  const Fixture fx({C(0.2)}, 2 * pi, small_config(2 * pi));
  const double g1 = fx.field.profile().g(1.0);
  for (int k = 0; k < 8; ++k) {
    const C e = std::polar(1.0, 2 * pi * k / 8 + 0.1);
    const TrialParams tp{MoebiusParam<>(e), CapParams<>(std::polar(1.0, 0.7 * k), 0.1 * k)};
    const auto v = fx.field.value(tp);
    const C expect = g1 * e * fx.spectrum.mean_f1;
    CHECK(std::abs(v.inner1 - expect) < 1e-8 * std::abs(expect));
    CHECK(std::abs(v.inner2) < 1e-8 * std::abs(expect));
  }
}

TEST_CASE("V at t = 1 does not depend on p") {
  const Fixture fx({C(0.1), C(0.0), C(0.05)}, -3.0, small_config(-3.0));
  const MoebiusParam<> w(C(0.35, 0.1));
  const auto v1 = fx.field.value({w, CapParams<>(C(1), 1.0)});
  const auto v2 = fx.field.value({w, CapParams<>(std::polar(1.0, 2.0), 1.0)});
  CHECK((v1.vec() - v2.vec()).norm() < 1e-10);
  // and is the limit of t -> 1
  const auto near = fx.field.value({w, CapParams<>(std::polar(1.0, 2.0), 0.9999)});
  CHECK((near.vec() - v1.vec()).norm() < 1e-2 * v1.norm());
}

TEST_CASE("reflection symmetry at t = 0") {
  const Fixture fx({C(0.2, 0.1), C(0.05, -0.08)}, 2.0, small_config(2.0));
  std::mt19937_64 rng(19);
  for (int i = 0; i < 32; ++i) {
    const auto s = SphereParam::from_vec(random_sphere(rng), 0.0);
    const C bu = s.b / std::abs(s.b);
    const auto v1 = fx.field.sphere_value(s);
    const auto v2 = fx.field.sphere_value({reflect(bu, s.a), -s.b, 0.0});
    CHECK(std::abs(v2.inner1 - reflect(bu, v1.inner1)) + std::abs(v2.inner2 - reflect(bu, v1.inner2)) < 1e-8);
  }
}

TEST_CASE("continuity in (w, p, t)") {
  const Fixture fx({C(0.2)}, 4.0, small_config(4.0));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::Vector4d x = random_sphere(rng);
    const double t = 0.2 + 0.2 * trial;
    Eigen::Vector4d dir = random_sphere(rng);
    dir -= dir.dot(x) * x;
    dir.normalize();
    const auto base = fx.field.sphere_value(SphereParam::from_vec(x, t)).vec();
    double prev = 1e9;
    for (double h : {0.04, 0.02, 0.01, 0.005}) {
      const auto moved = fx.field.sphere_value(SphereParam::from_vec((x + h * dir).normalized(), t + h)).vec();
      const double diff = (moved - base).norm();
      CHECK(diff < prev);
      CHECK(diff / h < 20.0);
      prev = diff;
    }
  }
}

TEST_CASE("Rayleigh quotient") {
  const auto disk = build_domain({});
  for (double beta : {-1.0, 0.0, 0.7}) {
    SolverConfig c = small_config(2 * pi * beta);
    const auto spec = solve_spectrum(disk, c);
    // profile matched to the disk's own boundary coefficient alpha / L = beta
    const RadialProfile prof(disk_lambda2(beta));
    const TrialField tf(disk, spec, prof);
    const auto r = tf.rayleigh({MoebiusParam<>(C(0)), CapParams<>(C(1), 1.0)});
    const double l2 = disk_lambda2(beta).lambda;
    CHECK(std::abs(r.quotient - l2) < 1e-8 * std::max(1.0, l2));
    CHECK(r.boundary_term == doctest::Approx(prof.g(1.0) * prof.g(1.0) * 2 * pi).epsilon(1e-12));
  }
  const auto spec0 = solve_spectrum(disk, small_config(0.0));
  const TrialField tf0(disk, spec0, default_profile(0.0));
  const auto r0 = tf0.rayleigh({MoebiusParam<>(C(0)), CapParams<>(C(1), 0.0)});
  CHECK(r0.dirichlet == 2 * tf0.profile().dirichlet_energy());
  CHECK(r0.quotient >= disk_lambda2(0.0).lambda);

  // |u| = g(1) on the whole circle, so the boundary term is g(1)^2 L
  const Fixture fx({C(0.2)}, 2.0, small_config(2.0));
  const double g1 = fx.field.profile().g(1.0);
  const auto r = fx.field.rayleigh({MoebiusParam<>(C(0.3, 0.1)), CapParams<>(std::polar(1.0, 1.0), 0.4)});
  CHECK(r.boundary_term == doctest::Approx(g1 * g1 * fx.domain.perimeter).epsilon(1e-10));
  CHECK(r.mass > 0);
}

TEST_CASE("find_zero on the Neumann disk") {
  const Fixture fx({}, 0.0, small_config(0.0));
  // the pair (w = 0, t = 1) is not a zero: <v, f_*> does not vanish
  const auto v = fx.field.value({MoebiusParam<>(C(0)), CapParams<>(C(1), 1.0)});
  CHECK(std::abs(v.inner1) < 1e-10);
  CHECK(std::abs(v.inner2) > 0.1);
  const auto res = find_zero(fx.field);
  CHECK(res.best.converged);
  CHECK(res.best.residual < 1e-7);
  CHECK(std::abs(res.best.w().value()) < 1.0);
}

TEST_CASE("find_zero delivers an orthogonal trial function") {
  const double beta = 0.5;
  SolverConfig c;
  c.alpha = 4 * pi * beta;
  const Fixture fx({C(0.2)}, c.alpha, c);
  const auto res = find_zero(fx.field);
  REQUIRE(res.best.converged);
  CHECK(std::abs(res.best.w().value()) < 1.0);
  CHECK((res.best.case_tag() == "t<1" || res.best.case_tag() == "t=1"));

  const TrialParams tp = res.best.trial();
  const auto quad = FoldQuadrature(tp.cap, fx.domain, fx.spectrum);
  const auto h = fx.field.trial_values(tp, quad);
  const double unorm = std::sqrt(quad.mass(h));
  const auto vf = quad.field(h);
  // <u, f_2> = <u, f_*> + rho <u, f_1>
  const C inner2 = vf.inner2 + fx.spectrum.rho * vf.inner1;
  CHECK(std::abs(vf.inner1) < 1e-6 * unorm);
  CHECK(std::abs(inner2) < 1e-6 * unorm);

  const auto r = fx.field.rayleigh(tp);
  const double tol = fx.spectrum.convergence_estimate;
  CHECK(r.quotient >= fx.spectrum.lambdas[2] - 10 * tol);
  CHECK(r.quotient * fx.domain.area < 2 * pi * disk_lambda2(beta).lambda + 10 * tol);

  // same answer with two worker threads
  SearchConfig cfg;
  cfg.jobs = 2;
  const auto res2 = find_zero(fx.field, cfg);
  CHECK(res2.best.params.vec() == res.best.params.vec());
  CHECK(res2.best.params.t == res.best.params.t);
}
