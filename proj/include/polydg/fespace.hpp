#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "polydg/mesh.hpp"
#include "polydg/parallel.hpp"
#include "polydg/quadrature.hpp"

namespace polydg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Number of modes of total degree <= p in 2D.
constexpr int n_modes(int p) { return p < 0 ? 0 : (p + 1) * (p + 2) / 2; }

/// Values (and optionally gradients) of the scaled tensor-Legendre basis
///   phi_{ij}(x) = sqrt((2i+1)(2j+1)) L_i(xi) L_j(eta),  i + j <= p,
/// where (xi, eta) in [-1,1]^2 are the coordinates of x in `bbox`. Modes are
/// ordered by total degree: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
/// With this scaling the Gram matrix on the box is |box| * I.
void eval_legendre_basis(int p, const Box& bbox, const Vec2& x, double* values, double* dx = nullptr,
                         double* dy = nullptr);

/// Exponents (i, j) of mode k.
std::pair<int, int> mode_exponents(int k);

/// Per-element quadrature data with basis tables. Rows are quadrature points.
struct ElementCache {
  QuadratureRule rule;
  MatrixXd phi;   // nq x nb
  MatrixXd dphi_x;
  MatrixXd dphi_y;
  Eigen::LLT<MatrixXd> mass_llt;  // unit-coefficient local Gram matrix
};

/// Discontinuous piecewise-polynomial space on the active elements of a mesh.
/// Elements with degree < 0 carry no dofs. Dof layout inside an element:
/// offset + component * n_basis + mode.
class DgSpace {
 public:
  DgSpace(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees, int components);

  /// Degree p on every element whose subdomain is in `subdomains` (all if empty).
  static std::shared_ptr<DgSpace> uniform(std::shared_ptr<const PolyMesh> mesh, int p, int components,
                                          const std::vector<Subdomain>& subdomains = {});

  const PolyMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const PolyMesh> mesh_ptr() const { return mesh_; }
  int components() const { return components_; }
  int degree(int e) const { return degrees_[e]; }
  const std::vector<int>& degrees() const { return degrees_; }
  bool active(int e) const { return degrees_[e] >= 0; }
  int n_basis(int e) const { return n_modes(degrees_[e]); }
  int n_local(int e) const { return components_ * n_basis(e); }
  int offset(int e) const { return offsets_[e]; }
  int dof(int e, int comp, int mode) const { return offsets_[e] + comp * n_basis(e) + mode; }
  int n_dofs() const { return n_dofs_; }
  int max_degree() const;
  const std::vector<int>& active_elements() const { return active_; }

  /// Quadrature of order 2p+2 with tabulated basis on element e.
  const ElementCache& cache(int e) const { return caches_[e]; }

  /// Basis values at an arbitrary point (point should be near the element).
  void eval(int e, const Vec2& x, VectorXd& values) const;
  void eval(int e, const Vec2& x, VectorXd& values, VectorXd& dx, VectorXd& dy) const;

  /// Value of component `comp` of the discrete field `u` at x in element e.
  double field_value(const VectorXd& u, int e, int comp, const Vec2& x) const;

  /// Max ratio of neighbouring degrees (for the bounded-variation check).
  double max_neighbor_degree_ratio() const;

 private:
  std::shared_ptr<const PolyMesh> mesh_;
  std::vector<int> degrees_;
  int components_;
  std::vector<int> offsets_;
  std::vector<int> active_;
  int n_dofs_ = 0;
  std::vector<ElementCache> caches_;
};

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

/// Element-wise L2 projection (local mass solve against moments).
VectorXd l2_project(const DgSpace& space, const ScalarFn& f);
VectorXd l2_project(const DgSpace& space, const VectorFn& f);

}  // namespace polydg
