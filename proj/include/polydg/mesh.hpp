#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace polydg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Subdomain : std::uint8_t { elastic, poroelastic, acoustic };

enum class FaceTag : std::uint8_t {
  interior,
  dirichlet,
  neumann,
  interface_open,
  interface_sealed,
  unassigned,  // boundary face not yet classified
};

std::string to_string(Subdomain s);
std::string to_string(FaceTag t);
Subdomain subdomain_from_string(const std::string& s);
FaceTag face_tag_from_string(const std::string& s);

struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol &&
           p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
  }
};

/// A mesh edge. The normal points out of `elements[0]`; `elements[1]` is -1
/// on the boundary.
struct Face {
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> elements{-1, -1};
  double measure = 0.0;
  Vec2 normal = Vec2::Zero();
  Vec2 midpoint = Vec2::Zero();
  FaceTag tag = FaceTag::unassigned;
  double tau = 1.0;  // interface permeability, meaningful on interface faces

  bool is_boundary() const { return elements[1] < 0; }
  bool is_interface() const {
    return tag == FaceTag::interface_open || tag == FaceTag::interface_sealed;
  }
  /// Local side (0 or 1) of element `e`, or -1 if not adjacent.
  int side_of(int e) const {
    return elements[0] == e ? 0 : (elements[1] == e ? 1 : -1);
  }
};

/// Conforming 2D polygonal mesh. Immutable once built.
class PolyMesh {
 public:
  PolyMesh() = default;

  /// Builds faces and element geometry from counter-clockwise vertex loops.
  /// Clockwise loops are reversed. Throws std::invalid_argument when an
  /// element is degenerate or self-intersecting, or when an edge is shared by
  /// more than two elements.
  PolyMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> elements,
           std::vector<Subdomain> labels = {}, std::vector<int> regions = {});

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_elements() const { return static_cast<int>(elements_.size()); }
  int n_faces() const { return static_cast<int>(faces_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::vector<int>& element(int e) const { return elements_[e]; }
  const std::vector<std::vector<int>>& elements() const { return elements_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }
  /// Faces of element `e`, in loop order (edge i joins vertex i and i+1).
  const std::vector<int>& element_faces(int e) const { return element_faces_[e]; }

  double diameter(int e) const { return diameter_[e]; }
  double area(int e) const { return area_[e]; }
  const Vec2& centroid(int e) const { return centroid_[e]; }
  const Box& bbox(int e) const { return bbox_[e]; }
  Subdomain subdomain(int e) const { return labels_[e]; }
  int region(int e) const { return regions_[e]; }
  const std::vector<Subdomain>& subdomains() const { return labels_; }
  const std::vector<int>& regions() const { return regions_; }

  /// max_e h_e
  double max_diameter() const;
  double total_area() const;
  Box bounding_box() const;

  /// Outward unit normal of `face` as seen from element `e`.
  Vec2 outward_normal(int face, int e) const;

  /// Elements whose closure contains `p` (point-in-polygon with tolerance).
  std::vector<int> locate(const Vec2& p, double tol = 1e-12) const;

  // Mutators used by classification; they keep geometry untouched.
  void set_face_tag(int f, FaceTag tag) { faces_[f].tag = tag; }
  void set_face_tau(int f, double tau) { faces_[f].tau = tau; }
  void set_labels(std::vector<Subdomain> labels);
  void set_regions(std::vector<int> regions);
  /// Makes element[0] of every poro/acoustic interface face the poro side.
  void orient_interfaces();

 private:
  void build();

  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> elements_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> element_faces_;
  std::vector<double> diameter_;
  std::vector<double> area_;
  std::vector<Vec2> centroid_;
  std::vector<Box> bbox_;
  std::vector<Subdomain> labels_;
  std::vector<int> regions_;
};

// ---------------------------------------------------------------------------
// Polygon helpers

double polygon_signed_area(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p, double tol = 1e-12);
bool polygon_is_simple(const std::vector<Vec2>& poly);
std::vector<Vec2> element_polygon(const PolyMesh& mesh, int e);

// ---------------------------------------------------------------------------
// Generation

/// Clipped Voronoi diagram of `n_elements` uniformly sampled seeds in `domain`
/// after `lloyd_iters` Lloyd relaxation sweeps. Deterministic in `rng_seed`.
PolyMesh generate_voronoi_mesh(const Box& domain, int n_elements, int lloyd_iters,
                               std::uint64_t rng_seed);

/// Searches for the seed count whose Voronoi mesh has max diameter closest to
/// `target_h`. Returns the mesh; the achieved h is `mesh.max_diameter()`.
PolyMesh voronoi_mesh_for_h(const Box& domain, double target_h, int lloyd_iters,
                            std::uint64_t rng_seed, int* n_used = nullptr);

/// One rectangular block of a multi-block Voronoi mesh.
struct MeshBlock {
  Box box;
  int n_elements = 1;
  Subdomain label = Subdomain::elastic;
  int region = 0;
};

/// Independent Voronoi meshes of each block, glued along shared block edges.
/// Block `i` uses an RNG stream derived from (rng_seed, i).
PolyMesh generate_block_voronoi_mesh(const std::vector<MeshBlock>& blocks, int lloyd_iters,
                                     std::uint64_t rng_seed);

/// Block mesh whose max diameter is closest to `target_h`. Element counts are
/// distributed in proportion to block areas; `n_elements` of the input is ignored.
PolyMesh block_voronoi_mesh_for_h(const std::vector<MeshBlock>& blocks, double target_h, int lloyd_iters,
                                  std::uint64_t rng_seed, int* n_used = nullptr);

/// Concatenates meshes whose boundaries touch. Coincident vertices are merged,
/// and a vertex of one part lying inside a boundary edge of another part is
/// inserted into that edge, so the result is conforming (with collinear
/// vertices where the parts did not match).
PolyMesh glue_meshes(const std::vector<PolyMesh>& parts);

/// nx-by-ny structured quadrilaterals, or triangles when `triangles` is set.
PolyMesh structured_mesh(const Box& domain, int nx, int ny, bool triangles = false);

// ---------------------------------------------------------------------------
// Classification

using BoundaryTagger = std::function<std::optional<FaceTag>(const Vec2& midpoint, const Vec2& normal)>;
using InterfaceLawFn = std::function<double(const Vec2& midpoint)>;

/// Returns a copy of `mesh` with boundary faces tagged by `tagger`, and faces
/// between poro-elastic and acoustic elements tagged open (tau > 0) or sealed
/// (tau == 0). Throws std::invalid_argument for an untagged boundary face or
/// for an unsupported subdomain pairing.
PolyMesh classify_boundary(const PolyMesh& mesh, const BoundaryTagger& tagger,
                           const InterfaceLawFn& tau = {});

/// Tagger returning `tag` for every boundary face.
BoundaryTagger uniform_tagger(FaceTag tag);

// ---------------------------------------------------------------------------
// Regularity diagnostics

struct RegularityReport {
  std::vector<double> element_ratio;                 // r_K per element
  std::vector<std::vector<double>> face_simplex_area;  // |S_K^F| per element face
  double max_ratio = 0.0;
  int worst_element = -1;
};

RegularityReport regularity_report(const PolyMesh& mesh);

// ---------------------------------------------------------------------------
// Text I/O: OFF-like format
//
//   POLYMESH 1
//   <n_vertices> <n_elements>
//   x y                            (n_vertices lines)
//   k v0 ... v{k-1} label [region] (n_elements lines)

void write_mesh(std::ostream& os, const PolyMesh& mesh);
PolyMesh read_mesh(std::istream& is);
PolyMesh read_mesh_file(const std::string& path);
void write_mesh_file(const std::string& path, const PolyMesh& mesh);

}  // namespace polydg
