#pragma once

#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  double measure() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1], exact to degree 2n-1.
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule1D& gauss_legendre(int n);

/// Collapsed (Duffy) Gauss product rule on the triangle (a, b, c), exact for
/// polynomials of total degree `order`. The triangle must be counter-clockwise.
QuadratureRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int order);

/// Centroid-fan sub-triangulation of a polygon. Throws std::invalid_argument
/// if a fan triangle has non-positive area (the polygon is not star-shaped
/// with respect to its centroid).
QuadratureRule polygon_quadrature(const std::vector<Vec2>& poly, int order);

QuadratureRule element_quadrature(const PolyMesh& mesh, int element, int order);

/// Gauss-Legendre rule on a face, points ordered from vertices[0] to vertices[1].
QuadratureRule face_quadrature(const PolyMesh& mesh, int face, int order);

QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int order);

}  // namespace polydg
