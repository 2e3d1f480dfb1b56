#include "polydg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace polydg {

namespace {

constexpr int kMaxGaussPoints = 48;

// (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, p0};
}

GaussRule1D compute_gauss(int n) {
  GaussRule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre_pair(n, x);
      const double dx = pn / (n * (x * pn - pm) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre_pair(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

double QuadratureRule::measure() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

const GaussRule1D& gauss_legendre(int n) {
  static const std::vector<GaussRule1D> table = [] {
    std::vector<GaussRule1D> t(kMaxGaussPoints + 1);
    for (int k = 1; k <= kMaxGaussPoints; ++k) t[k] = compute_gauss(k);
    return t;
  }();
  if (n < 1 || n > kMaxGaussPoints)
    throw std::invalid_argument("gauss_legendre: unsupported point count " + std::to_string(n));
  return table[n];
}

QuadratureRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int order) {
  if (order < 0) throw std::invalid_argument("triangle_quadrature: negative order");
  // P(s,t) = (1-s) a + s [(1-t) b + t c], Jacobian 2|T| s. The s-direction
  // integrand gains one degree from the Jacobian.
  const int ns = (order + 3) / 2;
  const int nt = (order + 2) / 2;
  const auto& gs = gauss_legendre(ns);
  const auto& gt = gauss_legendre(nt);
  const double area2 = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  QuadratureRule q;
  q.points.reserve(static_cast<std::size_t>(ns) * nt);
  q.weights.reserve(static_cast<std::size_t>(ns) * nt);
  for (int i = 0; i < ns; ++i) {
    const double s = 0.5 * (gs.nodes[i] + 1.0);
    const double ws = 0.5 * gs.weights[i];
    for (int j = 0; j < nt; ++j) {
      const double t = 0.5 * (gt.nodes[j] + 1.0);
      const double wt = 0.5 * gt.weights[j];
      q.points.push_back((1.0 - s) * a + s * ((1.0 - t) * b + t * c));
      q.weights.push_back(ws * wt * s * area2);
    }
  }
  return q;
}

QuadratureRule polygon_quadrature(const std::vector<Vec2>& poly, int order) {
  const Vec2 c = polygon_centroid(poly);
  const std::size_t n = poly.size();
  QuadratureRule q;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double area2 = (a - c).x() * (b - c).y() - (a - c).y() * (b - c).x();
    const double scale = (b - a).squaredNorm() + (a - c).squaredNorm();
    if (!(area2 > 1e-14 * scale))
      throw std::invalid_argument("polygon_quadrature: centroid fan triangle " + std::to_string(i) +
                                  " has non-positive area (element not star-shaped w.r.t. centroid)");
    auto t = triangle_quadrature(c, a, b, order);
    q.points.insert(q.points.end(), t.points.begin(), t.points.end());
    q.weights.insert(q.weights.end(), t.weights.begin(), t.weights.end());
  }
  return q;
}

QuadratureRule element_quadrature(const PolyMesh& mesh, int element, int order) {
  try {
    return polygon_quadrature(element_polygon(mesh, element), order);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("element " + std::to_string(element) + ": " + e.what());
  }
}

QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int order) {
  const int n = std::max(1, (order + 2) / 2);
  const auto& g = gauss_legendre(n);
  const double len = (b - a).norm();
  QuadratureRule q;
  q.points.reserve(n);
  q.weights.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (g.nodes[i] + 1.0);
    q.points.push_back((1.0 - s) * a + s * b);
    q.weights.push_back(0.5 * g.weights[i] * len);
  }
  return q;
}

QuadratureRule face_quadrature(const PolyMesh& mesh, int face, int order) {
  const Face& f = mesh.face(face);
  return segment_quadrature(mesh.vertex(f.vertices[0]), mesh.vertex(f.vertices[1]), order);
}

}  // namespace polydg
