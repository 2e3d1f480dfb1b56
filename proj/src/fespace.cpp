#include "polydg/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>

namespace polydg {

namespace {

constexpr int kMaxDegree = 20;

// Legendre values and first derivatives up to degree p.
void legendre_table(int p, double t, double* L, double* dL) {
  L[0] = 1.0;
  dL[0] = 0.0;
  if (p == 0) return;
  L[1] = t;
  dL[1] = 1.0;
  for (int n = 1; n < p; ++n) {
    L[n + 1] = ((2.0 * n + 1.0) * t * L[n] - n * L[n - 1]) / (n + 1.0);
    dL[n + 1] = dL[n - 1] + (2.0 * n + 1.0) * L[n];
  }
}

}  // namespace

std::pair<int, int> mode_exponents(int k) {
  int d = 0;
  while (n_modes(d) <= k) ++d;
  const int r = k - n_modes(d - 1);  // position within degree-d shell
  return {d - r, r};
}

void eval_legendre_basis(int p, const Box& bbox, const Vec2& x, double* values, double* dx, double* dy) {
  if (p < 0 || p > kMaxDegree) throw std::invalid_argument("eval_legendre_basis: unsupported degree");
  const double sx = 2.0 / bbox.width();
  const double sy = 2.0 / bbox.height();
  const double xi = (x.x() - bbox.lo.x()) * sx - 1.0;
  const double eta = (x.y() - bbox.lo.y()) * sy - 1.0;
  double Lx[kMaxDegree + 1], dLx[kMaxDegree + 1], Ly[kMaxDegree + 1], dLy[kMaxDegree + 1];
  legendre_table(p, xi, Lx, dLx);
  legendre_table(p, eta, Ly, dLy);
  int k = 0;
  for (int d = 0; d <= p; ++d) {
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      const double c = std::sqrt((2.0 * i + 1.0) * (2.0 * j + 1.0));
      values[k] = c * Lx[i] * Ly[j];
      if (dx) dx[k] = c * dLx[i] * sx * Ly[j];
      if (dy) dy[k] = c * Lx[i] * dLy[j] * sy;
      ++k;
    }
  }
}

DgSpace::DgSpace(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees, int components)
    : mesh_(std::move(mesh)), degrees_(std::move(degrees)), components_(components) {
  if (!mesh_) throw std::invalid_argument("DgSpace: null mesh");
  if (components_ != 1 && components_ != 2) throw std::invalid_argument("DgSpace: components must be 1 or 2");
  if (static_cast<int>(degrees_.size()) != mesh_->n_elements())
    throw std::invalid_argument("DgSpace: degree map size does not match element count");
  offsets_.assign(degrees_.size(), -1);
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    if (degrees_[e] > kMaxDegree) throw std::invalid_argument("DgSpace: degree above supported maximum");
    if (!active(e)) continue;
    offsets_[e] = n_dofs_;
    n_dofs_ += n_local(e);
    active_.push_back(e);
  }
  caches_.resize(degrees_.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(static_cast<int>(active_.size()), [&](int i) {
    const int e = active_[i];
    try {
      ElementCache& c = caches_[e];
      const int p = degrees_[e];
      const int nb = n_modes(p);
      c.rule = element_quadrature(*mesh_, e, 2 * p + 2);
      const int nq = c.rule.size();
      c.phi.resize(nq, nb);
      c.dphi_x.resize(nq, nb);
      c.dphi_y.resize(nq, nb);
      VectorXd v(nb), gx(nb), gy(nb);
      for (int q = 0; q < nq; ++q) {
        eval_legendre_basis(p, mesh_->bbox(e), c.rule.points[q], v.data(), gx.data(), gy.data());
        c.phi.row(q) = v.transpose();
        c.dphi_x.row(q) = gx.transpose();
        c.dphi_y.row(q) = gy.transpose();
      }
      const Eigen::Map<const VectorXd> w(c.rule.weights.data(), nq);
      const MatrixXd mass = c.phi.transpose() * w.asDiagonal() * c.phi;
      c.mass_llt.compute(mass);
      if (c.mass_llt.info() != Eigen::Success)
        throw std::runtime_error("DgSpace: singular local mass matrix on element " + std::to_string(e));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
}

std::shared_ptr<DgSpace> DgSpace::uniform(std::shared_ptr<const PolyMesh> mesh, int p, int components,
                                          const std::vector<Subdomain>& subdomains) {
  if (p < 0) throw std::invalid_argument("DgSpace::uniform: negative degree");
  std::vector<int> deg(mesh->n_elements(), -1);
  for (int e = 0; e < mesh->n_elements(); ++e) {
    const bool keep = subdomains.empty() ||
                      std::find(subdomains.begin(), subdomains.end(), mesh->subdomain(e)) != subdomains.end();
    if (keep) deg[e] = p;
  }
  return std::make_shared<DgSpace>(std::move(mesh), std::move(deg), components);
}

int DgSpace::max_degree() const {
  int p = -1;
  for (int d : degrees_) p = std::max(p, d);
  return p;
}

void DgSpace::eval(int e, const Vec2& x, VectorXd& values) const {
  values.resize(n_basis(e));
  eval_legendre_basis(degrees_[e], mesh_->bbox(e), x, values.data());
}

void DgSpace::eval(int e, const Vec2& x, VectorXd& values, VectorXd& dx, VectorXd& dy) const {
  const int nb = n_basis(e);
  values.resize(nb);
  dx.resize(nb);
  dy.resize(nb);
  eval_legendre_basis(degrees_[e], mesh_->bbox(e), x, values.data(), dx.data(), dy.data());
}

double DgSpace::field_value(const VectorXd& u, int e, int comp, const Vec2& x) const {
  VectorXd v;
  eval(e, x, v);
  return v.dot(u.segment(dof(e, comp, 0), n_basis(e)));
}

double DgSpace::max_neighbor_degree_ratio() const {
  double r = 1.0;
  for (const auto& f : mesh_->faces()) {
    if (f.is_boundary()) continue;
    const int a = degrees_[f.elements[0]], b = degrees_[f.elements[1]];
    if (a <= 0 || b <= 0) continue;
    r = std::max(r, static_cast<double>(std::max(a, b)) / std::min(a, b));
  }
  return r;
}

namespace {

template <int Comp, class F>
VectorXd project_impl(const DgSpace& space, const F& f) {
  VectorXd out = VectorXd::Zero(space.n_dofs());
  const auto& active = space.active_elements();
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    const ElementCache& c = space.cache(e);
    const int nb = space.n_basis(e);
    Eigen::Matrix<double, Eigen::Dynamic, Comp> rhs = Eigen::Matrix<double, Eigen::Dynamic, Comp>::Zero(nb, Comp);
    for (int q = 0; q < c.rule.size(); ++q) {
      const auto val = f(c.rule.points[q]);
      for (int k = 0; k < Comp; ++k) {
        double fv;
        if constexpr (Comp == 1) fv = val; else fv = val[k];
        rhs.col(k) += (c.rule.weights[q] * fv) * c.phi.row(q).transpose();
      }
    }
    for (int k = 0; k < Comp; ++k) out.segment(space.dof(e, k, 0), nb) = c.mass_llt.solve(rhs.col(k));
  });
  return out;
}

}  // namespace

VectorXd l2_project(const DgSpace& space, const ScalarFn& f) {
  if (space.components() != 1) throw std::invalid_argument("l2_project: scalar function on vector space");
  return project_impl<1>(space, f);
}

VectorXd l2_project(const DgSpace& space, const VectorFn& f) {
  if (space.components() != 2) throw std::invalid_argument("l2_project: vector function on scalar space");
  return project_impl<2>(space, f);
}

}  // namespace polydg
