#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

namespace {

// splitmix64; portable across standard libraries, unlike std distributions.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

using Polygon = std::vector<Vec2>;

// Keeps the part of `poly` where (x - m) . dir <= 0.
Polygon clip_halfplane(const Polygon& poly, const Vec2& m, const Vec2& dir) {
  Polygon out;
  out.reserve(poly.size() + 2);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double sp = (p - m).dot(dir);
    const double sq = (q - m).dot(dir);
    if (sp <= 0) out.push_back(p);
    if ((sp < 0 && sq > 0) || (sp > 0 && sq < 0)) {
      const double s = sp / (sp - sq);
      out.push_back(p + s * (q - p));
    }
  }
  return out;
}

// Uniform bucket grid over the domain for neighbour queries.
class SeedGrid {
 public:
  SeedGrid(const Box& box, const std::vector<Vec2>& seeds) : box_(box) {
    const double n = static_cast<double>(seeds.size());
    cell_ = std::sqrt(box.area() / std::max(1.0, n)) * 1.5;
    nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell_)));
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) buckets_[bucket(seeds[i])].push_back(i);
  }

  int ix(double x) const { return std::clamp(static_cast<int>((x - box_.lo.x()) / cell_), 0, nx_ - 1); }
  int iy(double y) const { return std::clamp(static_cast<int>((y - box_.lo.y()) / cell_), 0, ny_ - 1); }
  std::size_t bucket(const Vec2& p) const { return static_cast<std::size_t>(iy(p.y())) * nx_ + ix(p.x()); }

  // Calls fn(j) for every seed in the ring of buckets at Chebyshev distance r.
  template <class Fn>
  void for_ring(const Vec2& p, int r, Fn&& fn) const {
    const int cx = ix(p.x()), cy = iy(p.y());
    for (int j = cy - r; j <= cy + r; ++j) {
      if (j < 0 || j >= ny_) continue;
      for (int i = cx - r; i <= cx + r; ++i) {
        if (i < 0 || i >= nx_) continue;
        if (std::max(std::abs(i - cx), std::abs(j - cy)) != r) continue;
        for (int s : buckets_[static_cast<std::size_t>(j) * nx_ + i]) fn(s);
      }
    }
  }

  int max_ring() const { return std::max(nx_, ny_); }
  double cell() const { return cell_; }

 private:
  Box box_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

std::vector<Polygon> voronoi_cells(const Box& box, const std::vector<Vec2>& seeds) {
  const Polygon square{box.lo, {box.hi.x(), box.lo.y()}, box.hi, {box.lo.x(), box.hi.y()}};
  SeedGrid grid(box, seeds);
  std::vector<Polygon> cells(seeds.size());
  std::vector<std::pair<double, int>> ring;
  for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
    const Vec2 s = seeds[i];
    Polygon cell = square;
    auto radius = [&]() {
      double r = 0.0;
      for (const auto& v : cell) r = std::max(r, (v - s).norm());
      return r;
    };
    double r_cell = radius();
    for (int r = 0; r <= grid.max_ring(); ++r) {
      // Seeds in ring r are at least (r-1)*cell away from s.
      if (r >= 2 && (r - 1) * grid.cell() > 2.0 * r_cell) break;
      ring.clear();
      grid.for_ring(s, r, [&](int j) {
        if (j != i) ring.emplace_back((seeds[j] - s).squaredNorm(), j);
      });
      std::sort(ring.begin(), ring.end());
      for (const auto& [d2, j] : ring) {
        if (std::sqrt(d2) > 2.0 * r_cell) break;
        const Vec2 dir = seeds[j] - s;
        cell = clip_halfplane(cell, 0.5 * (s + seeds[j]), dir);
        r_cell = radius();
      }
    }
    cells[i] = std::move(cell);
  }
  return cells;
}

PolyMesh cells_to_mesh(const Box& box, const std::vector<Polygon>& cells) {
  const double tol = 1e-10 * std::hypot(box.width(), box.height());
  std::vector<Vec2> verts;
  std::unordered_map<long long, std::vector<int>> hash;
  auto key = [](long long i, long long j) { return i * 73856093LL ^ j * 19349663LL; };
  auto find_or_add = [&](const Vec2& p) {
    const long long i = static_cast<long long>(std::floor(p.x() / tol));
    const long long j = static_cast<long long>(std::floor(p.y() / tol));
    for (long long di = -1; di <= 1; ++di)
      for (long long dj = -1; dj <= 1; ++dj) {
        auto it = hash.find(key(i + di, j + dj));
        if (it == hash.end()) continue;
        for (int v : it->second)
          if ((verts[v] - p).norm() <= tol) return v;
      }
    verts.push_back(p);
    hash[key(i, j)].push_back(static_cast<int>(verts.size()) - 1);
    return static_cast<int>(verts.size()) - 1;
  };
  std::vector<std::vector<int>> elements;
  elements.reserve(cells.size());
  for (const auto& cell : cells) {
    std::vector<int> loop;
    for (const auto& p : cell) {
      const int v = find_or_add(p);
      if (loop.empty() || loop.back() != v) loop.push_back(v);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() < 3) throw std::runtime_error("generate_voronoi_mesh: degenerate Voronoi cell");
    elements.push_back(std::move(loop));
  }
  return PolyMesh(std::move(verts), std::move(elements));
}

}  // namespace

PolyMesh generate_voronoi_mesh(const Box& domain, int n_elements, int lloyd_iters, std::uint64_t rng_seed) {
  if (!(domain.width() > 0) || !(domain.height() > 0))
    throw std::invalid_argument("generate_voronoi_mesh: degenerate domain");
  if (n_elements < 1) throw std::invalid_argument("generate_voronoi_mesh: n_elements must be >= 1");
  if (lloyd_iters < 0) throw std::invalid_argument("generate_voronoi_mesh: lloyd_iters must be >= 0");

  SplitMix64 rng{rng_seed};
  std::vector<Vec2> seeds(n_elements);
  for (auto& s : seeds) {
    const double u = rng.uniform();
    const double v = rng.uniform();
    s = Vec2(domain.lo.x() + u * domain.width(), domain.lo.y() + v * domain.height());
  }
  auto cells = voronoi_cells(domain, seeds);
  for (int it = 0; it < lloyd_iters; ++it) {
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = polygon_centroid(cells[i]);
    cells = voronoi_cells(domain, seeds);
  }
  return cells_to_mesh(domain, cells);
}

namespace {

// Element count whose mesh has max diameter closest to target_h. h ~ c / sqrt(n):
// bracket by doubling, bisect on the (noisy) h(n), then scan neighbouring counts.
int count_for_h(const std::function<double(int)>& h_of, double target_h) {
  if (!(target_h > 0)) throw std::invalid_argument("mesh size target must be positive");
  int lo = 1, hi = 4;
  while (h_of(hi) > target_h && hi < (1 << 20)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (h_of(mid) > target_h) lo = mid; else hi = mid;
  }
  int best = hi;
  double best_err = std::abs(h_of(hi) - target_h);
  for (int n = std::max(1, lo - 3); n <= hi + 3; ++n) {
    const double err = std::abs(h_of(n) - target_h);
    if (err < best_err) {
      best_err = err;
      best = n;
    }
  }
  return best;
}

std::vector<MeshBlock> scaled_blocks(const std::vector<MeshBlock>& blocks, int n_total) {
  double area = 0.0;
  for (const auto& b : blocks) area += b.box.area();
  std::vector<MeshBlock> out = blocks;
  for (auto& b : out) b.n_elements = std::max(1, static_cast<int>(std::lround(n_total * b.box.area() / area)));
  return out;
}

}  // namespace

PolyMesh voronoi_mesh_for_h(const Box& domain, double target_h, int lloyd_iters, std::uint64_t rng_seed,
                            int* n_used) {
  const int best = count_for_h(
      [&](int n) { return generate_voronoi_mesh(domain, n, lloyd_iters, rng_seed).max_diameter(); }, target_h);
  if (n_used) *n_used = best;
  return generate_voronoi_mesh(domain, best, lloyd_iters, rng_seed);
}

PolyMesh block_voronoi_mesh_for_h(const std::vector<MeshBlock>& blocks, double target_h, int lloyd_iters,
                                  std::uint64_t rng_seed, int* n_used) {
  if (blocks.empty()) throw std::invalid_argument("block_voronoi_mesh_for_h: no blocks");
  const int best = count_for_h(
      [&](int n) {
        return generate_block_voronoi_mesh(scaled_blocks(blocks, n), lloyd_iters, rng_seed).max_diameter();
      },
      target_h);
  const auto scaled = scaled_blocks(blocks, best);
  if (n_used) {
    *n_used = 0;
    for (const auto& b : scaled) *n_used += b.n_elements;
  }
  return generate_block_voronoi_mesh(scaled, lloyd_iters, rng_seed);
}

PolyMesh generate_block_voronoi_mesh(const std::vector<MeshBlock>& blocks, int lloyd_iters,
                                     std::uint64_t rng_seed) {
  if (blocks.empty()) throw std::invalid_argument("generate_block_voronoi_mesh: no blocks");
  std::vector<PolyMesh> parts;
  parts.reserve(blocks.size());
  SplitMix64 stream{rng_seed};
  for (const auto& b : blocks) {
    PolyMesh part = generate_voronoi_mesh(b.box, b.n_elements, lloyd_iters, stream.next());
    part.set_labels(std::vector<Subdomain>(part.n_elements(), b.label));
    part.set_regions(std::vector<int>(part.n_elements(), b.region));
    parts.push_back(std::move(part));
  }
  return parts.size() == 1 ? parts.front() : glue_meshes(parts);
}

PolyMesh glue_meshes(const std::vector<PolyMesh>& parts) {
  if (parts.empty()) throw std::invalid_argument("glue_meshes: no parts");
  Vec2 lo = parts.front().bounding_box().lo, hi = parts.front().bounding_box().hi;
  for (const auto& m : parts) {
    const Box b = m.bounding_box();
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  const double tol = 1e-10 * (hi - lo).norm();

  // Merge coincident vertices across parts.
  std::vector<Vec2> verts;
  std::vector<std::vector<int>> loops;
  std::vector<Subdomain> labels;
  std::vector<int> regions;
  std::vector<std::pair<int, int>> boundary_edges;  // global ids
  for (const auto& m : parts) {
    std::vector<int> map(m.n_vertices());
    for (int v = 0; v < m.n_vertices(); ++v) {
      int found = -1;
      for (int g = 0; g < static_cast<int>(verts.size()); ++g)
        if ((verts[g] - m.vertex(v)).norm() <= tol) {
          found = g;
          break;
        }
      if (found < 0) {
        found = static_cast<int>(verts.size());
        verts.push_back(m.vertex(v));
      }
      map[v] = found;
    }
    for (int e = 0; e < m.n_elements(); ++e) {
      std::vector<int> loop;
      for (int v : m.element(e)) loop.push_back(map[v]);
      loops.push_back(std::move(loop));
      labels.push_back(m.subdomain(e));
      regions.push_back(m.region(e));
    }
    for (const auto& f : m.faces())
      if (f.is_boundary()) boundary_edges.emplace_back(map[f.vertices[0]], map[f.vertices[1]]);
  }

  std::vector<int> on_boundary;
  for (const auto& [a, b] : boundary_edges) {
    on_boundary.push_back(a);
    on_boundary.push_back(b);
  }
  std::sort(on_boundary.begin(), on_boundary.end());
  on_boundary.erase(std::unique(on_boundary.begin(), on_boundary.end()), on_boundary.end());

  // Split element edges at hanging vertices.
  for (auto& loop : loops) {
    std::vector<int> out;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int a = loop[i], b = loop[(i + 1) % n];
      out.push_back(a);
      const Vec2 pa = verts[a], d = verts[b] - pa;
      const double len2 = d.squaredNorm();
      std::vector<std::pair<double, int>> inner;
      for (int v : on_boundary) {
        if (v == a || v == b) continue;
        const Vec2 q = verts[v] - pa;
        const double s = q.dot(d) / len2;
        if (s <= 0.0 || s >= 1.0) continue;
        if (std::abs(q.x() * d.y() - q.y() * d.x()) / std::sqrt(len2) > tol) continue;
        inner.emplace_back(s, v);
      }
      std::sort(inner.begin(), inner.end());
      for (const auto& [s, v] : inner) out.push_back(v);
    }
    loop = std::move(out);
  }
  return PolyMesh(std::move(verts), std::move(loops), std::move(labels), std::move(regions));
}

}  // namespace polydg
