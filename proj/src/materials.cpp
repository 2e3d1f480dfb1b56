#include "polydg/materials.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace polydg {

namespace {

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument(what); }

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const PolyMesh& mesh, int e, const char* kind) {
  const auto it = m.find(mesh.region(e));
  if (it == m.end())
    reject(std::string("no ") + kind + " material for region " + std::to_string(mesh.region(e)) + " (element " +
           std::to_string(e) + ")");
  return it->second;
}

}  // namespace

void ElasticMaterial::validate(int d) const {
  if (!(rho > 0)) reject("elastic material: rho must be > 0");
  if (!(mu > 0)) reject("elastic material: mu must be > 0");
  if (!(lambda + 2.0 * mu / d > 0)) reject("elastic material: lambda + 2 mu / d must be > 0");
  if (!(zeta >= 0)) reject("elastic material: zeta must be >= 0");
}

double ElasticMaterial::p_velocity() const { return std::sqrt((lambda + 2.0 * mu) / rho); }
double ElasticMaterial::s_velocity() const { return std::sqrt(mu / rho); }

void PoroMaterial::validate(int d) const {
  if (!(phi > 0 && phi < 1)) reject("poro material: porosity must lie in (0,1)");
  if (!(rho_f > 0) || !(rho_s > 0)) reject("poro material: densities must be > 0");
  if (!(a >= 1)) reject("poro material: tortuosity must be >= 1");
  if (!(eta >= 0)) reject("poro material: viscosity must be >= 0");
  if (!(k > 0)) reject("poro material: permeability must be > 0");
  if (!(m > 0)) reject("poro material: Biot modulus must be > 0");
  if (!(beta >= 0 && beta <= 1)) reject("poro material: Biot coefficient must lie in [0,1]");
  if (!(mu > 0) || !(lambda + 2.0 * mu / d > 0)) reject("poro material: invalid drained Lame coefficients");
}

PoroDensities PoroMaterial::derived() const { return derived_poro_densities(*this); }

PoroDensities derived_poro_densities(const PoroMaterial& mat) {
  if (!(mat.phi > 0 && mat.phi < 1)) reject("derived_poro_densities: porosity must lie in (0,1)");
  PoroDensities d;
  d.rho = mat.phi * mat.rho_f + (1.0 - mat.phi) * mat.rho_s;
  d.rho_w = mat.a * mat.rho_f / mat.phi;
  d.rho_u = mat.rho_s * (1.0 - mat.phi) / 2.0;
  return d;
}

void AcousticMaterial::validate() const {
  if (!(rho_a > 0)) reject("acoustic material: rho_a must be > 0");
  if (!(c > 0)) reject("acoustic material: c must be > 0");
}

double zeta_tau(double tau) {
  if (!(tau > 0 && tau <= 1)) reject("zeta_tau: tau must lie in (0,1]");
  return (1.0 - tau) / tau;
}

double stiffness_norm(const ElasticMaterial& mat, int d) {
  if (d != 2 && d != 3) reject("stiffness_norm: d must be 2 or 3");
  // Orthonormal basis of symmetric tensors: e_ii, and (e_ij + e_ji)/sqrt(2).
  const int n = d * (d + 1) / 2;
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) V(i, j) = mat.lambda;
    V(i, i) += 2.0 * mat.mu;
  }
  for (int s = d; s < n; ++s) V(s, s) = 2.0 * mat.mu;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

const ElasticMaterial& MaterialTable::elastic(const PolyMesh& mesh, int e) const {
  return lookup(elastic_, mesh, e, "elastic");
}
const PoroMaterial& MaterialTable::poro(const PolyMesh& mesh, int e) const { return lookup(poro_, mesh, e, "poroelastic"); }
const AcousticMaterial& MaterialTable::acoustic(const PolyMesh& mesh, int e) const {
  return lookup(acoustic_, mesh, e, "acoustic");
}

void MaterialTable::check_covers(const PolyMesh& mesh) const {
  for (int e = 0; e < mesh.n_elements(); ++e) {
    switch (mesh.subdomain(e)) {
      case Subdomain::elastic: elastic(mesh, e).validate(); break;
      case Subdomain::poroelastic: poro(mesh, e).validate(); break;
      case Subdomain::acoustic: acoustic(mesh, e).validate(); break;
    }
  }
}

}  // namespace polydg
