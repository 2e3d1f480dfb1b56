#pragma once

#include <map>
#include <string>
#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

struct ElasticMaterial {
  double rho = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double zeta = 0.0;  // mass-proportional damping rate [1/s]

  void validate(int d = 2) const;
  double p_velocity() const;  // sqrt((lambda + 2 mu) / rho)
  double s_velocity() const;
};

struct PoroDensities {
  double rho = 0.0;    // phi rho_f + (1 - phi) rho_s
  double rho_w = 0.0;  // a rho_f / phi
  double rho_u = 0.0;  // rho_s (1 - phi) / 2
};

struct PoroMaterial {
  double rho_f = 1.0;
  double rho_s = 1.0;
  double phi = 0.5;
  double a = 1.0;       // tortuosity; a = 1 accepted
  double eta = 0.0;     // fluid viscosity
  double k = 1.0;       // permeability
  double m = 1.0;       // Biot modulus
  double beta = 1.0;    // Biot coefficient
  double lambda = 1.0;  // drained Lame coefficients
  double mu = 1.0;

  void validate(int d = 2) const;
  ElasticMaterial skeleton() const { return {derived().rho, lambda, mu, 0.0}; }
  PoroDensities derived() const;
  double eta_over_k() const { return eta / k; }
};

PoroDensities derived_poro_densities(const PoroMaterial& mat);

struct AcousticMaterial {
  double rho_a = 1.0;
  double c = 1.0;

  void validate() const;
};

/// (1 - tau) / tau on open faces; throws for tau outside (0, 1].
double zeta_tau(double tau);

/// Largest eigenvalue of the isotropic stiffness tensor acting on symmetric
/// d x d tensors (Frobenius inner product), i.e. d lambda + 2 mu. Computed
/// from the orthonormally scaled Voigt matrix.
double stiffness_norm(const ElasticMaterial& mat, int d = 2);

/// Material records keyed by (subdomain, region id).
class MaterialTable {
 public:
  void set(int region, const ElasticMaterial& m) { elastic_[region] = m; }
  void set(int region, const PoroMaterial& m) { poro_[region] = m; }
  void set(int region, const AcousticMaterial& m) { acoustic_[region] = m; }

  const ElasticMaterial& elastic(const PolyMesh& mesh, int e) const;
  const PoroMaterial& poro(const PolyMesh& mesh, int e) const;
  const AcousticMaterial& acoustic(const PolyMesh& mesh, int e) const;

  /// Throws when an element's (subdomain, region) pair has no record.
  void check_covers(const PolyMesh& mesh) const;

  const std::map<int, ElasticMaterial>& elastic_records() const { return elastic_; }
  const std::map<int, PoroMaterial>& poro_records() const { return poro_; }
  const std::map<int, AcousticMaterial>& acoustic_records() const { return acoustic_; }

 private:
  std::map<int, ElasticMaterial> elastic_;
  std::map<int, PoroMaterial> poro_;
  std::map<int, AcousticMaterial> acoustic_;
};

}  // namespace polydg
