#include <doctest.h>

#include <cmath>

#include "polydg/analysis.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/timeint.hpp"

using namespace polydg;

namespace {

struct Scalar {
  SparseOperator M, D, A;
  LoadFunction load;
  SecondOrderSystem sys() const { return {&M, &D, &A, &load, {{0}}}; }
};

Scalar scalar(double m, double d, double a) {
  auto one = [](double v) { return SparseOperator::from_dense(MatrixXd::Constant(1, 1, v)); };
  return {one(m), one(d), one(a), LoadFunction(1)};
}

VectorXd vec(double x) { return VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("initial acceleration") {
  const Scalar s = scalar(2.0, 0.0, 8.0);
  CHECK(initial_acceleration(s.sys(), vec(1.0), vec(0.0))[0] == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(initial_acceleration(s.sys(), vec(0.0), vec(0.0))[0] == 0.0);
}

TEST_CASE("single-dof Newmark and leap-frog steps") {
  const Scalar s = scalar(1.0, 0.0, 1.0);
  const double dt = 0.1;
  {
    NewmarkIntegrator nm(s.sys(), {0.25, 0.5, dt});
    const State x1 = nm.step(nm.initial_state(vec(1.0), vec(0.0)));
    const double expected = (1 - dt * dt / 4) / (1 + dt * dt / 4);
    CHECK(std::abs(x1.X[0] - expected) < 1e-14);
    CHECK(std::abs(x1.X[0] - 0.9975 / 1.0025) < 1e-14);
  }
  {
    NewmarkIntegrator lf(s.sys(), NewmarkParams::leapfrog(dt));
    CHECK(lf.explicit_scheme());
    const State x1 = lf.step(lf.initial_state(vec(1.0), vec(0.0)));
    CHECK(std::abs(x1.X[0] - 0.995) < 1e-14);
  }
}

TEST_CASE("closed-form recurrence over many steps") {
  // Newmark(1/4, 1/2) on x'' + x = 0 is a rotation by 2 atan(dt/2) per step.
  const Scalar s = scalar(1.0, 0.0, 1.0);
  const double dt = 0.05;
  NewmarkIntegrator nm(s.sys(), {0.25, 0.5, dt});
  State st = nm.initial_state(vec(1.0), vec(0.0));
  const double theta = 2.0 * std::atan(dt / 2.0);
  for (int k = 1; k <= 200; ++k) {
    st = nm.step(st);
    CHECK(std::abs(st.X[0] - std::cos(k * theta)) < 1e-12);
  }
}

TEST_CASE("linear-in-time solutions are reproduced") {
  Scalar s = scalar(3.0, 0.7, 5.0);
  const double x1 = 0.8;
  s.load.add([](double) { return 1.0; }, vec(0.7 * x1));
  s.load.add([](double t) { return t; }, vec(5.0 * x1));
  for (const NewmarkParams& p : {NewmarkParams{0.25, 0.5, 0.01}, NewmarkParams{0.3, 0.6, 0.02}, NewmarkParams::leapfrog(0.01)}) {
    NewmarkIntegrator nm(s.sys(), p);
    State st = nm.initial_state(vec(0.0), vec(x1));
    for (int k = 1; k <= 50; ++k) {
      st = nm.step(st);
      CHECK(std::abs(st.X[0] - st.t * x1) < 1e-12);
      CHECK(std::abs(st.Z[0] - x1) < 1e-12);
    }
  }
}

TEST_CASE("zero data stays zero and T = t0 returns the start") {
  const Scalar s = scalar(1.0, 0.2, 4.0);
  NewmarkIntegrator nm(s.sys(), {0.25, 0.5, 0.1});
  const State z = integrate(nm, nm.initial_state(vec(0.0), vec(0.0)), 1.0);
  CHECK(z.X[0] == 0.0);
  CHECK(z.Z[0] == 0.0);
  const State start = nm.initial_state(vec(1.0), vec(2.0));
  const State same = integrate(nm, start, 0.0);
  CHECK(same.X[0] == 1.0);
  CHECK(same.step == 0);
  CHECK_THROWS_AS(integrate(nm, start, 0.25), std::invalid_argument);
}

TEST_CASE("parameter validation and explicit restrictions") {
  CHECK_THROWS_AS(NewmarkParams({0.6, 0.5, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NewmarkParams({0.25, 1.5, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NewmarkParams({0.25, 0.5, 0.0}).validate(), std::invalid_argument);
  // coupled damping couples elements: leap-frog must refuse it
  MatrixXd M = MatrixXd::Identity(2, 2), D(2, 2), A = MatrixXd::Identity(2, 2);
  D << 0, 1, -1, 0;
  const SparseOperator Ms = SparseOperator::from_dense(M), Ds = SparseOperator::from_dense(D),
                       As = SparseOperator::from_dense(A);
  const SecondOrderSystem sys{&Ms, &Ds, &As, nullptr, {{0}, {1}}};
  CHECK_THROWS_AS(NewmarkIntegrator(sys, NewmarkParams::leapfrog(0.1)), std::invalid_argument);
  CHECK_NOTHROW(NewmarkIntegrator(sys, NewmarkParams{0.25, 0.5, 0.1}));
}

TEST_CASE("non-finite states abort with the step index") {
  const Scalar s = scalar(1.0, 0.0, 1.0);
  NewmarkIntegrator lf(s.sys(), NewmarkParams::leapfrog(3.0));  // far beyond the stability limit
  try {
    integrate(lf, lf.initial_state(vec(1.0), vec(0.0)), 3000.0);
    FAIL("expected a runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("non-finite state at step") != std::string::npos);
  }
}

TEST_CASE("poro initial acceleration solves the momentum balance") {
  const auto sol = poro_manufactured();
  PolyMesh raw = generate_voronoi_mesh(sol.domain, 12, 1, 3);
  raw.set_labels(std::vector<Subdomain>(12, Subdomain::poroelastic));
  auto mesh = std::make_shared<PolyMesh>(classify_boundary(raw, uniform_tagger(FaceTag::dirichlet)));
  BlockSystem sys = build_block_system(ProblemKind::poro, mesh, 2, sol.materials(), {});
  sys.load = manufactured_load(sys, sol, {});
  VectorXd X, Z;
  project_exact_state(sys, sol, 0.0, X, Z);
  const auto so = SecondOrderSystem::from(sys);
  const VectorXd L = initial_acceleration(so, X, Z);
  const VectorXd S = sys.load(0.0);
  const VectorXd r = sys.M * L + sys.D * Z + sys.A * X - S;
  CHECK(r.norm() <= 1e-10 * S.norm() + 1e-12);
}

TEST_CASE("undamped Newmark conserves the algebraic energy") {
  const auto sol = elastic_manufactured();
  auto mesh = std::make_shared<PolyMesh>(
      classify_boundary(generate_voronoi_mesh(sol.domain, 16, 1, 5), uniform_tagger(FaceTag::dirichlet)));
  MaterialTable t;
  t.set(0, ElasticMaterial{});
  const BlockSystem sys = build_block_system(ProblemKind::elastic, mesh, 2, t, {});
  VectorXd X = l2_project(*sys.vector_space, VectorFn([](const Vec2& x) {
    return Vec2(std::sin(3 * x.x()) * x.y(), x.x() * x.x() - x.y());
  }));
  NewmarkIntegrator nm(SecondOrderSystem::from(sys), {0.25, 0.5, 1e-3});
  EnergyMonitor mon(sys);
  integrate(nm, nm.initial_state(X, VectorXd::Zero(X.size())), 0.5, {mon.observer()});
  const double e0 = mon.records().front().total();
  for (const auto& r : mon.records()) CHECK(std::abs(r.total() - e0) <= 1e-10 * e0);
}
