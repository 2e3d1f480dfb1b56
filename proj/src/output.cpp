#include "polydg/output.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "polydg/sources.hpp"

namespace polydg {

namespace {

struct FieldSample {
  Vec2 u = Vec2::Zero(), v = Vec2::Zero(), w = Vec2::Zero();
  double phi = 0.0, pressure = 0.0;
};

bool has_filtration(ProblemKind k) { return k != ProblemKind::elastic; }

Vec2 vector_value(const DgSpace& sp, const VectorXd& X, int offset, int e, const VectorXd& b) {
  const int nb = sp.n_basis(e);
  return {b.dot(X.segment(offset + sp.dof(e, 0, 0), nb)), b.dot(X.segment(offset + sp.dof(e, 1, 0), nb))};
}

double vector_div(const DgSpace& sp, const VectorXd& X, int offset, int e, const VectorXd& dx, const VectorXd& dy) {
  const int nb = sp.n_basis(e);
  return dx.dot(X.segment(offset + sp.dof(e, 0, 0), nb)) + dy.dot(X.segment(offset + sp.dof(e, 1, 0), nb));
}

FieldSample sample(const BlockSystem& sys, const State& s, int e, const Vec2& x) {
  FieldSample out;
  const auto& L = sys.layout;
  VectorXd b, dx, dy;
  if (sys.vector_space && sys.vector_space->active(e)) {
    const DgSpace& sp = *sys.vector_space;
    sp.eval(e, x, b, dx, dy);
    out.u = vector_value(sp, s.X, L.u_offset, e, b);
    out.v = vector_value(sp, s.Z, L.u_offset, e, b);
    if (has_filtration(sys.kind)) {
      out.w = vector_value(sp, s.X, L.w_offset, e, b);
      const double div_u = vector_div(sp, s.X, L.u_offset, e, dx, dy);
      const double div_w = vector_div(sp, s.X, L.w_offset, e, dx, dy);
      out.pressure = -sys.coeffs.m[e] * (sys.coeffs.beta[e] * div_u + div_w) + 0.0;  // no "-0" in the output
    }
  } else if (sys.acoustic_space && sys.acoustic_space->active(e)) {
    const DgSpace& sp = *sys.acoustic_space;
    sp.eval(e, x, b);
    const int nb = sp.n_basis(e);
    out.phi = b.dot(s.X.segment(L.phi_offset + sp.dof(e, 0, 0), nb));
    out.pressure = sys.coeffs.rho_a[e] * b.dot(s.Z.segment(L.phi_offset + sp.dof(e, 0, 0), nb));
  }
  return out;
}

const ElementCache* element_cache(const BlockSystem& sys, int e) {
  if (sys.vector_space && sys.vector_space->active(e)) return &sys.vector_space->cache(e);
  if (sys.acoustic_space && sys.acoustic_space->active(e)) return &sys.acoustic_space->cache(e);
  return nullptr;
}

FieldSample average(const BlockSystem& sys, const State& s, int e) {
  FieldSample acc;
  const ElementCache* c = element_cache(sys, e);
  if (!c) return acc;
  double total = 0.0;
  for (int q = 0; q < c->rule.size(); ++q) {
    const double wq = c->rule.weights[q];
    const FieldSample f = sample(sys, s, e, c->rule.points[q]);
    acc.u += wq * f.u;
    acc.v += wq * f.v;
    acc.w += wq * f.w;
    acc.phi += wq * f.phi;
    acc.pressure += wq * f.pressure;
    total += wq;
  }
  const double inv = 1.0 / total;
  acc.u *= inv;
  acc.v *= inv;
  acc.w *= inv;
  acc.phi *= inv;
  acc.pressure *= inv;
  return acc;
}

void write_fields(std::ostream& os, const std::vector<FieldSample>& f, ProblemKind kind) {
  auto vec = [&](const char* name, Vec2 FieldSample::*m) {
    os << "VECTORS " << name << " double\n";
    for (const auto& x : f) os << (x.*m).x() << ' ' << (x.*m).y() << " 0\n";
  };
  auto scal = [&](const char* name, auto get) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& x : f) os << get(x) << '\n';
  };
  vec("displacement", &FieldSample::u);
  vec("velocity", &FieldSample::v);
  scal("velocity_magnitude", [](const FieldSample& x) { return x.v.norm(); });
  if (has_filtration(kind)) {
    vec("filtration", &FieldSample::w);
    scal("pressure", [](const FieldSample& x) { return x.pressure; });
  }
  if (kind == ProblemKind::coupled) scal("potential", [](const FieldSample& x) { return x.phi; });
}

}  // namespace

double pressure_at(const BlockSystem& sys, const State& s, int e, const Vec2& x) {
  return sample(sys, s, e, x).pressure;
}

void write_vtk_snapshot(std::ostream& os, const BlockSystem& sys, const State& s, const std::string& title) {
  const PolyMesh& mesh = sys.vector_space ? sys.vector_space->mesh() : sys.acoustic_space->mesh();
  std::vector<Vec2> points;
  std::vector<int> owner;
  std::vector<std::vector<int>> cells;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& loop = mesh.element(e);
    const int k = static_cast<int>(loop.size());
    std::vector<int> cell;
    for (int i = 0; i < k; ++i) {
      const Vec2& a = mesh.vertex(loop[i]);
      const Vec2& b = mesh.vertex(loop[(i + 1) % k]);
      for (const Vec2& p : {a, Vec2(0.5 * (a + b))}) {
        cell.push_back(static_cast<int>(points.size()));
        points.push_back(p);
        owner.push_back(e);
      }
    }
    cells.push_back(std::move(cell));
  }

  const auto old_precision = os.precision(10);
  std::string head = title.substr(0, 200);
  for (char& c : head)
    if (c == '\n') c = ' ';
  os << "# vtk DataFile Version 3.0\n" << head << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) os << p.x() << ' ' << p.y() << " 0\n";
  std::size_t size = 0;
  for (const auto& c : cells) size += c.size() + 1;
  os << "CELLS " << cells.size() << ' ' << size << '\n';
  for (const auto& c : cells) {
    os << c.size();
    for (int i : c) os << ' ' << i;
    os << '\n';
  }
  os << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) os << "7\n";

  std::vector<FieldSample> cell_values(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) cell_values[e] = average(sys, s, e);
  os << "CELL_DATA " << cells.size() << '\n';
  os << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.n_elements(); ++e) os << static_cast<int>(mesh.subdomain(e)) << '\n';
  os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.n_elements(); ++e) os << mesh.region(e) << '\n';
  write_fields(os, cell_values, sys.kind);

  std::vector<FieldSample> point_values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) point_values[i] = sample(sys, s, owner[i], points[i]);
  os << "POINT_DATA " << points.size() << '\n';
  write_fields(os, point_values, sys.kind);
  os.precision(old_precision);
}

ProbeRecorder::ProbeRecorder(const BlockSystem& sys, std::vector<Vec2> points, int cadence)
    : sys_(&sys), points_(std::move(points)), cadence_(std::max(1, cadence)) {
  header_.push_back("t");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const DgSpace& sp = sys.vector_space ? *sys.vector_space : *sys.acoustic_space;
    int e = -1;
    for (int cand : sp.mesh().locate(points_[i], 1e-9)) {
      const bool active = (sys.vector_space && sys.vector_space->active(cand)) ||
                          (sys.acoustic_space && sys.acoustic_space->active(cand));
      if (active) {
        e = cand;
        break;
      }
    }
    if (e < 0)
      throw std::invalid_argument("probe " + std::to_string(i) + " at (" + std::to_string(points_[i].x()) + ", " +
                                  std::to_string(points_[i].y()) + ") lies outside the mesh");
    hosts_.push_back(e);
    const std::string p = "p" + std::to_string(i) + "_";
    if (sys.acoustic_space && sys.acoustic_space->active(e)) {
      header_.push_back(p + "phi");
      header_.push_back(p + "pressure");
    } else {
      for (const char* c : {"ux", "uy", "vx", "vy"}) header_.push_back(p + c);
      if (has_filtration(sys.kind))
        for (const char* c : {"wx", "wy", "pressure"}) header_.push_back(p + c);
    }
  }
}

void ProbeRecorder::operator()(const State& s) {
  if (s.step % cadence_ != 0) return;
  std::vector<double> row{s.t};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const int e = hosts_[i];
    const FieldSample f = sample(*sys_, s, e, points_[i]);
    if (sys_->acoustic_space && sys_->acoustic_space->active(e)) {
      row.insert(row.end(), {f.phi, f.pressure});
    } else {
      row.insert(row.end(), {f.u.x(), f.u.y(), f.v.x(), f.v.y()});
      if (has_filtration(sys_->kind)) row.insert(row.end(), {f.w.x(), f.w.y(), f.pressure});
    }
  }
  rows_.push_back(std::move(row));
}

void ProbeRecorder::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << '\n';
  const auto old = os.precision(12);
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  os.precision(old);
}

}  // namespace polydg
