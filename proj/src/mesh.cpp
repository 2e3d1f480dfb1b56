#include "polydg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace polydg {

std::string to_string(Subdomain s) {
  switch (s) {
    case Subdomain::elastic: return "elastic";
    case Subdomain::poroelastic: return "poroelastic";
    case Subdomain::acoustic: return "acoustic";
  }
  return "?";
}

std::string to_string(FaceTag t) {
  switch (t) {
    case FaceTag::interior: return "interior";
    case FaceTag::dirichlet: return "dirichlet";
    case FaceTag::neumann: return "neumann";
    case FaceTag::interface_open: return "interface-open";
    case FaceTag::interface_sealed: return "interface-sealed";
    case FaceTag::unassigned: return "unassigned";
  }
  return "?";
}

Subdomain subdomain_from_string(const std::string& s) {
  if (s == "elastic") return Subdomain::elastic;
  if (s == "poroelastic" || s == "poro") return Subdomain::poroelastic;
  if (s == "acoustic") return Subdomain::acoustic;
  throw std::invalid_argument("unknown subdomain label '" + s + "'");
}

FaceTag face_tag_from_string(const std::string& s) {
  if (s == "dirichlet") return FaceTag::dirichlet;
  if (s == "neumann") return FaceTag::neumann;
  if (s == "interior") return FaceTag::interior;
  if (s == "interface-open") return FaceTag::interface_open;
  if (s == "interface-sealed") return FaceTag::interface_sealed;
  throw std::invalid_argument("unknown face tag '" + s + "'");
}

// ---------------------------------------------------------------------------

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  // Shift to the first vertex to limit cancellation on far-away polygons.
  const Vec2 o = poly.front();
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i] - o;
    const Vec2 q = poly[(i + 1) % n] - o;
    const double cr = p.x() * q.y() - q.x() * p.y();
    a += cr;
    c += cr * (p + q);
  }
  return o + c / (3.0 * a);
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  double s = l2 > 0 ? (p - a).dot(ab) / l2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

}  // namespace

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p, double tol) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= tol) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect_properly(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

std::vector<Vec2> element_polygon(const PolyMesh& mesh, int e) {
  std::vector<Vec2> poly;
  poly.reserve(mesh.element(e).size());
  for (int v : mesh.element(e)) poly.push_back(mesh.vertex(v));
  return poly;
}

// ---------------------------------------------------------------------------

PolyMesh::PolyMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> elements,
                   std::vector<Subdomain> labels, std::vector<int> regions)
    : vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      labels_(std::move(labels)),
      regions_(std::move(regions)) {
  if (labels_.empty()) labels_.assign(elements_.size(), Subdomain::elastic);
  if (regions_.empty()) regions_.assign(elements_.size(), 0);
  if (labels_.size() != elements_.size() || regions_.size() != elements_.size())
    throw std::invalid_argument("PolyMesh: label/region count does not match element count");
  build();
}

void PolyMesh::build() {
  const int ne = n_elements();
  if (ne == 0) throw std::invalid_argument("PolyMesh: no elements");
  diameter_.assign(ne, 0.0);
  area_.assign(ne, 0.0);
  centroid_.assign(ne, Vec2::Zero());
  bbox_.assign(ne, Box{});

  for (int e = 0; e < ne; ++e) {
    auto& loop = elements_[e];
    if (loop.size() < 3)
      throw std::invalid_argument("PolyMesh: element " + std::to_string(e) + " has fewer than 3 vertices");
    for (int v : loop) {
      if (v < 0 || v >= n_vertices())
        throw std::invalid_argument("PolyMesh: element " + std::to_string(e) + " references missing vertex");
    }
    auto poly = element_polygon(*this, e);
    double a = polygon_signed_area(poly);
    if (a < 0) {
      std::reverse(loop.begin(), loop.end());
      std::reverse(poly.begin(), poly.end());
      a = -a;
    }
    if (!(a > 0))
      throw std::invalid_argument("PolyMesh: element " + std::to_string(e) + " has zero area");
    if (!polygon_is_simple(poly))
      throw std::invalid_argument("PolyMesh: element " + std::to_string(e) + " is self-intersecting");
    area_[e] = a;
    centroid_[e] = polygon_centroid(poly);
    double h = 0.0;
    Box b{poly[0], poly[0]};
    for (std::size_t i = 0; i < poly.size(); ++i) {
      b.lo = b.lo.cwiseMin(poly[i]);
      b.hi = b.hi.cwiseMax(poly[i]);
      for (std::size_t j = i + 1; j < poly.size(); ++j) h = std::max(h, (poly[i] - poly[j]).norm());
    }
    diameter_[e] = h;
    bbox_[e] = b;
  }

  // Faces from edges. Key is the sorted vertex pair.
  std::map<std::pair<int, int>, int> edge_to_face;
  faces_.clear();
  element_faces_.assign(ne, {});
  for (int e = 0; e < ne; ++e) {
    const auto& loop = elements_[e];
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % k];
      if (a == b)
        throw std::invalid_argument("PolyMesh: repeated vertex in element " + std::to_string(e));
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = edge_to_face.find(key);
      if (it == edge_to_face.end()) {
        Face f;
        f.vertices = {a, b};
        f.elements = {e, -1};
        const Vec2 t = vertices_[b] - vertices_[a];
        f.measure = t.norm();
        f.normal = Vec2(t.y(), -t.x()) / f.measure;  // outward for a CCW loop
        f.midpoint = 0.5 * (vertices_[a] + vertices_[b]);
        edge_to_face.emplace(key, n_faces());
        element_faces_[e].push_back(n_faces());
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.elements[1] >= 0)
          throw std::invalid_argument("PolyMesh: edge shared by more than two elements");
        if (f.elements[0] == e)
          throw std::invalid_argument("PolyMesh: element " + std::to_string(e) + " repeats an edge");
        f.elements[1] = e;
        f.tag = FaceTag::interior;
        element_faces_[e].push_back(it->second);
      }
    }
  }
}

double PolyMesh::max_diameter() const { return *std::max_element(diameter_.begin(), diameter_.end()); }

double PolyMesh::total_area() const {
  double a = 0.0;
  for (double x : area_) a += x;
  return a;
}

Box PolyMesh::bounding_box() const {
  Box b{vertices_.front(), vertices_.front()};
  for (const auto& v : vertices_) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

Vec2 PolyMesh::outward_normal(int f, int e) const {
  const Face& face = faces_[f];
  if (face.elements[0] == e) return face.normal;
  if (face.elements[1] == e) return -face.normal;
  throw std::invalid_argument("outward_normal: element is not adjacent to face");
}

std::vector<int> PolyMesh::locate(const Vec2& p, double tol) const {
  std::vector<int> hits;
  for (int e = 0; e < n_elements(); ++e) {
    if (!bbox_[e].contains(p, tol)) continue;
    if (point_in_polygon(element_polygon(*this, e), p, tol)) hits.push_back(e);
  }
  return hits;
}

void PolyMesh::set_labels(std::vector<Subdomain> labels) {
  if (labels.size() != elements_.size()) throw std::invalid_argument("set_labels: size mismatch");
  labels_ = std::move(labels);
}

void PolyMesh::set_regions(std::vector<int> regions) {
  if (regions.size() != elements_.size()) throw std::invalid_argument("set_regions: size mismatch");
  regions_ = std::move(regions);
}

void PolyMesh::orient_interfaces() {
  for (auto& f : faces_) {
    if (f.is_boundary()) continue;
    if (labels_[f.elements[0]] == Subdomain::acoustic && labels_[f.elements[1]] != Subdomain::acoustic) {
      std::swap(f.elements[0], f.elements[1]);
      std::swap(f.vertices[0], f.vertices[1]);
      f.normal = -f.normal;
    }
  }
}

// ---------------------------------------------------------------------------

BoundaryTagger uniform_tagger(FaceTag tag) {
  return [tag](const Vec2&, const Vec2&) -> std::optional<FaceTag> { return tag; };
}

PolyMesh classify_boundary(const PolyMesh& mesh, const BoundaryTagger& tagger, const InterfaceLawFn& tau) {
  PolyMesh out = mesh;
  out.orient_interfaces();
  for (int f = 0; f < out.n_faces(); ++f) {
    const Face& face = out.face(f);
    if (face.is_boundary()) {
      auto tag = tagger(face.midpoint, face.normal);
      if (!tag)
        throw std::invalid_argument("classify_boundary: boundary face " + std::to_string(f) + " at (" +
                                    std::to_string(face.midpoint.x()) + ", " +
                                    std::to_string(face.midpoint.y()) + ") has no tag");
      if (*tag != FaceTag::dirichlet && *tag != FaceTag::neumann)
        throw std::invalid_argument("classify_boundary: boundary faces must be dirichlet or neumann");
      out.set_face_tag(f, *tag);
      continue;
    }
    const Subdomain a = out.subdomain(face.elements[0]);
    const Subdomain b = out.subdomain(face.elements[1]);
    if (a == b) {
      out.set_face_tag(f, FaceTag::interior);
      continue;
    }
    if (a != Subdomain::poroelastic || b != Subdomain::acoustic)
      throw std::invalid_argument("classify_boundary: unsupported subdomain pairing " + to_string(a) + "/" +
                                  to_string(b));
    const double t = tau ? tau(face.midpoint) : 1.0;
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("classify_boundary: interface permeability must lie in [0,1]");
    out.set_face_tau(f, t);
    out.set_face_tag(f, t > 0.0 ? FaceTag::interface_open : FaceTag::interface_sealed);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Triangle (a, b, c) lies inside the polygon when its vertices do and none of
// its edges crosses a polygon edge.
bool triangle_inside(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 g = (a + b + c) / 3.0;
  if (!point_in_polygon(poly, g, 1e-14)) return false;
  const std::size_t n = poly.size();
  const std::array<std::pair<Vec2, Vec2>, 3> edges{{{a, b}, {b, c}, {c, a}}};
  for (const auto& [p, q] : edges) {
    for (std::size_t i = 0; i < n; ++i)
      if (segments_intersect_properly(p, q, poly[i], poly[(i + 1) % n])) return false;
  }
  return true;
}

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * std::abs(cross(b - a, c - a)); }

}  // namespace

RegularityReport regularity_report(const PolyMesh& mesh) {
  constexpr double d = 2.0;
  RegularityReport rep;
  rep.element_ratio.assign(mesh.n_elements(), 0.0);
  rep.face_simplex_area.assign(mesh.n_elements(), {});
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto poly = element_polygon(mesh, e);
    const Vec2 c = mesh.centroid(e);
    const auto& loop = mesh.element(e);
    const std::size_t k = loop.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % k];
      double s = 0.0;
      if (triangle_inside(poly, a, b, c)) {
        s = triangle_area(a, b, c);
      } else {
        // Vertex sampling: apex at any polygon vertex or on a sub-sampled
        // segment towards the centroid.
        for (std::size_t j = 0; j < k; ++j) {
          for (int m = 1; m <= 8; ++m) {
            const Vec2 apex = poly[j] + (c - poly[j]) * (m / 8.0);
            if (triangle_inside(poly, a, b, apex)) s = std::max(s, triangle_area(a, b, apex));
          }
        }
      }
      rep.face_simplex_area[e].push_back(s);
      const double len = (b - a).norm();
      const double r = s > 0 ? mesh.diameter(e) * len / (d * s) : std::numeric_limits<double>::infinity();
      worst = std::max(worst, r);
    }
    rep.element_ratio[e] = worst;
    if (worst > rep.max_ratio) {
      rep.max_ratio = worst;
      rep.worst_element = e;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

PolyMesh structured_mesh(const Box& domain, int nx, int ny, bool triangles) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("structured_mesh: need nx, ny >= 1");
  if (!(domain.area() > 0)) throw std::invalid_argument("structured_mesh: degenerate domain");
  std::vector<Vec2> v;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.emplace_back(domain.lo.x() + domain.width() * i / nx, domain.lo.y() + domain.height() * j / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::vector<int>> el;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (triangles) {
        el.push_back({a, b, c});
        el.push_back({a, c, d});
      } else {
        el.push_back({a, b, c, d});
      }
    }
  }
  return PolyMesh(std::move(v), std::move(el));
}

// ---------------------------------------------------------------------------

void write_mesh(std::ostream& os, const PolyMesh& mesh) {
  os << "POLYMESH 1\n" << mesh.n_vertices() << ' ' << mesh.n_elements() << '\n';
  os.precision(17);
  for (const auto& v : mesh.vertices()) os << v.x() << ' ' << v.y() << '\n';
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& loop = mesh.element(e);
    os << loop.size();
    for (int v : loop) os << ' ' << v;
    os << ' ' << to_string(mesh.subdomain(e)) << ' ' << mesh.region(e) << '\n';
  }
}

PolyMesh read_mesh(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "POLYMESH" || version != 1)
    throw std::invalid_argument("read_mesh: missing 'POLYMESH 1' header");
  int nv = 0, ne = 0;
  if (!(is >> nv >> ne) || nv < 3 || ne < 1) throw std::invalid_argument("read_mesh: bad counts line");
  std::vector<Vec2> v(nv);
  for (int i = 0; i < nv; ++i) {
    if (!(is >> v[i].x() >> v[i].y())) throw std::invalid_argument("read_mesh: truncated vertex list");
  }
  std::vector<std::vector<int>> el(ne);
  std::vector<Subdomain> labels(ne, Subdomain::elastic);
  std::vector<int> regions(ne, 0);
  std::string line;
  std::getline(is, line);
  for (int e = 0; e < ne; ++e) {
    if (!std::getline(is, line)) throw std::invalid_argument("read_mesh: truncated element list");
    std::istringstream ls(line);
    int k = 0;
    if (!(ls >> k) || k < 3) throw std::invalid_argument("read_mesh: bad element line " + std::to_string(e));
    el[e].resize(k);
    for (int i = 0; i < k; ++i) {
      if (!(ls >> el[e][i])) throw std::invalid_argument("read_mesh: bad element line " + std::to_string(e));
    }
    std::string label;
    if (ls >> label) labels[e] = subdomain_from_string(label);
    int r = 0;
    if (ls >> r) regions[e] = r;
  }
  return PolyMesh(std::move(v), std::move(el), std::move(labels), std::move(regions));
}

PolyMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh_file(const std::string& path, const PolyMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file '" + path + "'");
  write_mesh(out, mesh);
}

}  // namespace polydg
