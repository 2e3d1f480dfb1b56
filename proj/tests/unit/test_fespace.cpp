#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polydg/analysis.hpp"
#include "polydg/fespace.hpp"
#include "polydg/quadrature.hpp"

using namespace polydg;
using std::numbers::pi;

namespace {

std::shared_ptr<PolyMesh> square_mesh(int n) { return std::make_shared<PolyMesh>(structured_mesh(Box{}, n, n)); }

double integrate(const QuadratureRule& r, const std::function<double(const Vec2&)>& f) {
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q) s += r.weights[q] * f(r.points[q]);
  return s;
}

}  // namespace

TEST_CASE("polygon quadrature") {
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(integrate(polygon_quadrature(square, 0), [](const Vec2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));

  // Polar moment of a regular n-gon with circumradius R: n R^4 sin(2 pi/n) (2 + cos(2 pi/n)) / 12.
  const int n = 5;
  std::vector<Vec2> pentagon;
  for (int k = 0; k < n; ++k) pentagon.emplace_back(std::cos(2 * pi * k / n), std::sin(2 * pi * k / n));
  const double exact = n * std::sin(2 * pi / n) * (2 + std::cos(2 * pi / n)) / 12.0;
  const double got = integrate(polygon_quadrature(pentagon, 2), [](const Vec2& x) { return x.squaredNorm(); });
  CHECK(std::abs(got - exact) < 1e-12);

  const QuadratureRule seg = segment_quadrature({0.3, 0.1}, {1.3, 2.1}, 3);
  double w = 0.0;
  for (double x : seg.weights) w += x;
  CHECK(w == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("quadrature is exact up to its order") {
  const std::vector<Vec2> poly{{0, 0}, {2, 0.2}, {2.4, 1.5}, {1, 2.2}, {-0.3, 1.1}};
  for (int order = 1; order <= 10; ++order) {
    const auto f = [order](const Vec2& x) { return std::pow(x.x(), order - order / 2) * std::pow(x.y(), order / 2); };
    const double a = integrate(polygon_quadrature(poly, order), f);
    const double b = integrate(polygon_quadrature(poly, order + 8), f);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("basis values and dimensions") {
  CHECK(n_modes(1) == 3);
  CHECK(n_modes(4) == 15);
  const Box box{{0.2, -1}, {1.7, 0.5}};
  double v[15], dx[15], dy[15];
  eval_legendre_basis(4, box, {0.9, -0.3}, v, dx, dy);
  CHECK(v[0] == 1.0);
  CHECK(dx[0] == 0.0);
  CHECK(dy[0] == 0.0);
}

TEST_CASE("gram matrix on the bounding box") {
  auto mesh = square_mesh(1);
  for (int p = 1; p <= 4; ++p) {
    auto space = DgSpace::uniform(mesh, p, 1);
    const SparseOperator M = assemble_mass(*space, ElementField{1.0});
    CHECK((M.to_dense() - MatrixXd::Identity(n_modes(p), n_modes(p))).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("projection reproduces polynomials") {
  auto mesh = std::make_shared<PolyMesh>(generate_voronoi_mesh(Box{}, 15, 1, 2));
  auto space = DgSpace::uniform(mesh, 1, 2);
  const VectorFn f = [](const Vec2& x) { return Vec2(1 + 2 * x.x() - x.y(), 3 * x.y()); };
  const VectorXd u = l2_project(*space, f);
  const VectorGradFn exact = [&](const Vec2& x) {
    Mat2 g;
    g << 2, -1, 0, 3;
    return std::pair<Vec2, Mat2>(f(x), g);
  };
  CHECK(std::sqrt(l2_error_sq(*space, u, exact)) < 1e-12);
  CHECK(l2_project(*space, VectorFn([](const Vec2&) { return Vec2::Zero(); })).norm() == 0.0);
}

TEST_CASE("projection error decays like h^(p+1)") {
  const ScalarGradFn exact = [](const Vec2& x) {
    const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
    return std::pair<double, Vec2>(sx * sy, Vec2(pi * std::cos(pi * x.x()) * sy, pi * sx * std::cos(pi * x.y())));
  };
  for (int p = 1; p <= 3; ++p) {
    std::vector<double> errs, hs;
    for (int n : {4, 8, 16}) {
      auto mesh = square_mesh(n);
      auto space = DgSpace::uniform(mesh, p, 1);
      const VectorXd u = l2_project(*space, ScalarFn([&](const Vec2& x) { return exact(x).first; }));
      errs.push_back(std::sqrt(l2_error_sq(*space, u, exact)));
      hs.push_back(mesh->max_diameter());
    }
    CHECK(convergence_rates(errs, hs).least_squares == doctest::Approx(p + 1).epsilon(0.1));
  }
}
