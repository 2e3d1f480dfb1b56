#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/dense_oracle.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/sources.hpp"

using namespace polydg;

namespace {

std::shared_ptr<PolyMesh> grid(int n) {
  return std::make_shared<PolyMesh>(classify_boundary(structured_mesh(Box{}, n, n), uniform_tagger(FaceTag::dirichlet)));
}

VectorXd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

}  // namespace

TEST_CASE("ricker wavelet") {
  Wavelet w;
  w.amplitude = 1.0;
  w.peak_frequency = 5.0;
  w.t0 = 0.3;
  CHECK(w(0.3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.beta_p() == doctest::Approx(25.0 * std::numbers::pi * std::numbers::pi));
  const double r = 1.0 / std::sqrt(2.0 * w.beta_p());
  CHECK(std::abs(w(0.3 + r)) < 1e-15);
  CHECK(std::abs(w(0.3 - r)) < 1e-15);
  CHECK(w(0.3 + 0.5 * r) > 0.0);
  CHECK(w(0.3 + 1.5 * r) < 0.0);
  const Wavelet b = Wavelet::ricker_from_beta(2.0, 39.4784, 0.75);
  CHECK(b.beta_p() == doctest::Approx(39.4784).epsilon(1e-14));
  CHECK(b(0.75) == doctest::Approx(2.0));
}

TEST_CASE("sampled wavelet interpolates linearly") {
  Wavelet w;
  w.kind = Wavelet::Kind::samples;
  w.times = {0.0, 1.0, 3.0};
  w.values = {0.0, 2.0, -2.0};
  CHECK(w(0.5) == doctest::Approx(1.0));
  CHECK(w(2.0) == doctest::Approx(0.0));
  CHECK(w(-1.0) == 0.0);
  CHECK(w(4.0) == 0.0);
}

TEST_CASE("point force") {
  auto mesh = grid(4);
  auto space = DgSpace::uniform(mesh, 3, 2);
  const Vec2 x0(0.37, 0.61), dir(0.6, -0.8);
  const VectorXd b = point_force_load(*space, x0, dir);
  const int host = locate_host(*space, x0);
  for (int i = 0; i < b.size(); ++i)
    if (i < space->offset(host) || i >= space->offset(host) + space->n_local(host)) CHECK(b[i] == 0.0);

  const VectorXd v = random_vector(space->n_dofs(), 3);
  const double expected = dir.x() * space->field_value(v, host, 0, x0) + dir.y() * space->field_value(v, host, 1, x0);
  CHECK(std::abs(b.dot(v) - expected) < 1e-12 * std::max(1.0, std::abs(expected)));

  CHECK(point_force_load(*space, x0, Vec2::Zero()).norm() == 0.0);
  // constant mode of the scaled basis is 1
  CHECK(b[space->dof(host, 0, 0)] == doctest::Approx(dir.x()));
  CHECK_THROWS_AS(point_force_load(*space, Vec2(1.5, 0.5), dir), std::invalid_argument);
}

TEST_CASE("point on a shared face goes to the lowest element id") {
  auto mesh = grid(2);
  auto space = DgSpace::uniform(mesh, 1, 2);
  const Vec2 x(0.5, 0.25);
  const auto hits = mesh->locate(x, 1e-12);
  REQUIRE(hits.size() == 2);
  CHECK(locate_host(*space, x, false) == std::min(hits[0], hits[1]));
}

TEST_CASE("moment tensor") {
  auto mesh = grid(4);
  auto space = DgSpace::uniform(mesh, 3, 2);
  const Vec2 x0(0.375, 0.375);
  CHECK(double_couple_load(*space, x0, Mat2::Zero()).norm() == 0.0);

  // isotropic moment against a divergence-free field
  const VectorXd z = l2_project(*space, VectorFn([](const Vec2& x) {
    return Vec2(x.y() * x.y(), x.x() * x.x());
  }));
  CHECK(std::abs(double_couple_load(*space, x0, 2.5 * Mat2::Identity()).dot(z)) < 1e-12);

  SUBCASE("limit of a mollified moment density") {
    Mat2 m;
    m << 1.0, 0.4, 0.4, -0.7;
    const VectorXd v = random_vector(space->n_dofs(), 11);
    const double pairing = double_couple_load(*space, x0, m).dot(v);
    const int host = locate_host(*space, x0);
    // the density is negligible outside a box of half-width 6 eps around x0
    const double eps = 2e-3, r = 6 * eps;
    const std::vector<Vec2> box{x0 + Vec2(-r, -r), x0 + Vec2(r, -r), x0 + Vec2(r, r), x0 + Vec2(-r, r)};
    const auto rule = oracle::polygon_rule(box, 40);
    // int -div(m g_eps) . v = int -(m grad g_eps) . v
    double mollified = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 d = rule.points[q] - x0;
      const double g = std::exp(-d.squaredNorm() / (eps * eps)) / (std::numbers::pi * eps * eps);
      const Vec2 grad_g = -2.0 * d / (eps * eps) * g;
      const Vec2 f = -(m * grad_g);
      mollified += rule.weights[q] *
                   (f.x() * space->field_value(v, host, 0, rule.points[q]) + f.y() * space->field_value(v, host, 1, rule.points[q]));
    }
    CHECK(std::abs(mollified - pairing) < 1e-2 * std::abs(pairing));
  }

  const Mat2 M = moment_tensor(3.0, Vec2(0, 1), Vec2(1, 0));
  CHECK(M(0, 1) == doctest::Approx(3.0));
  CHECK(M(1, 0) == doctest::Approx(3.0));
  CHECK(M(0, 0) == 0.0);
  CHECK(M(1, 1) == 0.0);
}

TEST_CASE("plane wave amplitude") {
  Wavelet w;
  w.peak_frequency = 2.0;
  w.t0 = 0.5;
  const double rho = 2.0, c = 3.0;
  CHECK(plane_wave_amplitude(0.9, 4.0, 1.0, c, rho, w) == 0.0);  // arrival at t = 1
  Wavelet flat;
  flat.kind = Wavelet::Kind::samples;
  flat.times = {0.0, 10.0};
  flat.values = {1.5, 1.5};
  CHECK(plane_wave_amplitude(2.0, 1.0, 1.0, c, rho, flat) == doctest::Approx(1.5 * 2.0 / (2 * rho * c)).epsilon(1e-10));
  // int_0^inf Ricker = t0 exp(-beta t0^2), since s exp(-beta s^2) is an antiderivative of the pulse.
  const double limit = w.t0 * std::exp(-w.beta_p() * w.t0 * w.t0) / (2 * rho * c);
  CHECK(plane_wave_amplitude(20.0, 1.0, 1.0, c, rho, w) == doctest::Approx(limit).epsilon(1e-8).scale(1e-12));
}

TEST_CASE("disk indicator load") {
  auto mesh = grid(5);
  auto space = DgSpace::uniform(mesh, 2, 1);
  const VectorXd one = l2_project(*space, ScalarFn([](const Vec2&) { return 1.0; }));
  const double r = 0.15;
  const VectorXd b = disk_indicator_load(*space, {Vec2(0.5, 0.5), Vec2(0.2, 0.23)}, r);
  CHECK(b.dot(one) == doctest::Approx(2 * std::numbers::pi * r * r).epsilon(1e-10));
  const VectorXd x = l2_project(*space, ScalarFn([](const Vec2& p) { return p.x(); }));
  CHECK(disk_indicator_load(*space, {Vec2(0.5, 0.5)}, r).dot(x) == doctest::Approx(0.5 * std::numbers::pi * r * r).epsilon(1e-10));
}

namespace {

// fourth-order central differences
template <class F>
auto d1(const F& f, double x, double h) -> decltype(f(x)) {
  return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}
template <class F>
auto d2(const F& f, double x, double h) -> decltype(f(x)) {
  return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h * h);
}

Mat2 hooke(const Mat2& grad, double lambda, double mu) {
  const Mat2 eps = 0.5 * (grad + grad.transpose());
  return lambda * eps.trace() * Mat2::Identity() + 2.0 * mu * eps;
}

template <class Tensor>
Vec2 fd_div(const Tensor& sigma, const Vec2& x, double h) {
  const Mat2 sx = d1([&](double s) { return Mat2(sigma(Vec2(s, x.y()))); }, x.x(), h);
  const Mat2 sy = d1([&](double s) { return Mat2(sigma(Vec2(x.x(), s))); }, x.y(), h);
  return {sx(0, 0) + sy(0, 1), sx(1, 0) + sy(1, 1)};
}

}  // namespace

TEST_CASE("manufactured forcing matches finite differences of the strong operators") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.1, 0.9), T(0.05, 0.9);
  const double h = 1e-3;

  SUBCASE("elastic") {
    const auto sol = elastic_manufactured();
    const auto F = manufactured_forcing(sol);
    const auto m = sol.elastic;
    for (int k = 0; k < 10; ++k) {
      const Vec2 x(U(rng), U(rng));
      const double t = T(rng);
      const auto u = [&](double s) { return Vec2(sol.u.value(x, s)); };
      const Vec2 div = fd_div([&](const Vec2& y) { return hooke(sol.u.grad(y, t), m.lambda, m.mu); }, x, h);
      const Vec2 f = m.rho * (d2(u, t, h) + 2 * m.zeta * d1(u, t, h) + m.zeta * m.zeta * u(t)) - div;
      CHECK((F.f_at(x, t) - f).norm() <= 1e-6 * std::max(1.0, f.norm()));
    }
  }
  SUBCASE("poro and acoustic") {
    const auto sol = coupled_manufactured();
    const auto F = manufactured_forcing(sol);
    const auto p = sol.poro;
    const auto d = p.derived();
    const auto a = sol.acoustic;
    for (int k = 0; k < 10; ++k) {
      const Vec2 x(sol.poro_domain.lo.x() + U(rng) * sol.poro_domain.width(), U(rng));
      const double t = T(rng);
      const auto pressure = [&](const Vec2& y) {
        return -p.m * (p.beta * sol.u.grad(y, t).trace() + sol.w.grad(y, t).trace());
      };
      const auto total = [&](const Vec2& y) {
        return Mat2(hooke(sol.u.grad(y, t), p.lambda, p.mu) - p.beta * pressure(y) * Mat2::Identity());
      };
      const Vec2 grad_p(d1([&](double s) { return pressure(Vec2(s, x.y())); }, x.x(), h),
                        d1([&](double s) { return pressure(Vec2(x.x(), s)); }, x.y(), h));
      const auto u = [&](double s) { return Vec2(sol.u.value(x, s)); };
      const auto w = [&](double s) { return Vec2(sol.w.value(x, s)); };
      const Vec2 f = d.rho * d2(u, t, h) + p.rho_f * d2(w, t, h) - fd_div(total, x, h);
      const Vec2 g = p.rho_f * d2(u, t, h) + d.rho_w * d2(w, t, h) + p.eta_over_k() * d1(w, t, h) + grad_p;
      CHECK((F.f_at(x, t) - f).norm() <= 1e-6 * std::max(1.0, f.norm()));
      CHECK((F.g_at(x, t) - g).norm() <= 1e-6 * std::max(1.0, g.norm()));

      const Vec2 y(sol.acoustic_domain.lo.x() + U(rng) * sol.acoustic_domain.width(), U(rng));
      const auto phi = [&](double s) { return sol.phi.value(y, s); };
      const double lap = d1([&](double s) { return sol.phi.grad(Vec2(s, y.y()), t).x(); }, y.x(), h) +
                         d1([&](double s) { return sol.phi.grad(Vec2(y.x(), s), t).y(); }, y.y(), h);
      const double hv = a.rho_a / (a.c * a.c) * d2(phi, t, h) - a.rho_a * lap;
      CHECK(std::abs(F.h_at(y, t) - hv) <= 1e-6 * std::max(1.0, std::abs(hv)));
    }
  }
}
