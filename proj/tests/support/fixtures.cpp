#include "fixtures.hpp"

namespace fixtures {

using namespace polydg;

namespace {

std::shared_ptr<const PolyMesh> finish(PolyMesh m, std::vector<Subdomain> labels, double tau = 1.0) {
  m.set_labels(std::move(labels));
  const double x0 = m.bounding_box().lo.x();
  auto tagger = [x0](const Vec2& mid, const Vec2&) -> std::optional<FaceTag> {
    return std::abs(mid.x() - x0) < 1e-12 ? FaceTag::neumann : FaceTag::dirichlet;
  };
  return std::make_shared<const PolyMesh>(classify_boundary(m, tagger, [tau](const Vec2&) { return tau; }));
}

}  // namespace

std::vector<NamedMesh> tiny_meshes(Subdomain label) {
  std::vector<NamedMesh> out;
  out.push_back({"square", finish(structured_mesh(Box{}, 1, 1), {label})});
  out.push_back({"two quads", finish(structured_mesh(Box{{0, 0}, {2, 1}}, 2, 1), {label, label})});
  out.push_back({"two triangles", finish(structured_mesh(Box{{0, 0}, {1.5, 1}}, 1, 1, true), {label, label})});
  out.push_back({"three voronoi cells", finish(generate_voronoi_mesh(Box{{0, 0}, {1.2, 1}}, 3, 1, 9),
                                               {label, label, label})});
  // A pentagon and two quadrilaterals sharing a vertex of degree three.
  std::vector<Vec2> v{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1.3, 1.2}, {0, 1}, {1.1, 0.55}};
  std::vector<std::vector<int>> loops{{0, 1, 6, 4, 5}, {1, 2, 3, 6}, {6, 3, 4}};
  out.push_back({"polygon fan", finish(PolyMesh(v, loops), {label, label, label})});
  return out;
}

std::vector<NamedMesh> tiny_coupled_meshes(double tau) {
  std::vector<NamedMesh> out;
  const auto P = Subdomain::poroelastic, A = Subdomain::acoustic;
  out.push_back({"poro | acoustic", finish(structured_mesh(Box{{0, 0}, {2, 1}}, 2, 1), {P, A}, tau)});
  out.push_back({"poro poro | acoustic", finish(structured_mesh(Box{{-1, 0}, {2, 1}}, 3, 1), {P, P, A}, tau)});
  std::vector<Vec2> v{{0, 0}, {1, 0}, {2.2, 0}, {2, 1}, {1, 1.3}, {0, 1}};
  // poro quad on the left, acoustic quad on the right, interface {1,0}-{1,1.3}
  out.push_back({"kinked quads", finish(PolyMesh(v, {{0, 1, 4, 5}, {1, 2, 3, 4}}), {P, A}, tau)});
  return out;
}

std::vector<double> varying(const PolyMesh& mesh, double c0) {
  static const double f[] = {1.0, 2.5, 0.7, 1.6, 0.4};
  std::vector<double> out(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) out[e] = c0 * f[e % 5];
  return out;
}

}  // namespace fixtures
