#pragma once

#include <memory>
#include <string>
#include <vector>

#include "polydg/mesh.hpp"

namespace fixtures {

struct NamedMesh {
  std::string name;
  std::shared_ptr<const polydg::PolyMesh> mesh;
};

/// Meshes of one to three elements with a single label. Left side Neumann,
/// the rest Dirichlet, so both boundary treatments are exercised.
std::vector<NamedMesh> tiny_meshes(polydg::Subdomain label);

/// Two or three elements: poro elements left of x = 1, acoustic to the right.
std::vector<NamedMesh> tiny_coupled_meshes(double tau);

/// Per-element coefficient c0 * (1, 2.5, 0.7, ...) so neighbours differ.
std::vector<double> varying(const polydg::PolyMesh& mesh, double c0);

}  // namespace fixtures
