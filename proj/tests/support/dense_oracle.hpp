#pragma once

// Brute-force dense evaluation of the bilinear forms, used to cross-check the
// sparse assembly on tiny meshes. Shares only the basis evaluation with the
// library: quadrature (vertex fan + Golub-Welsch Gauss), face roles, penalties,
// jumps and averages are recomputed here from their definitions.

#include <vector>

#include "polydg/forms.hpp"

namespace oracle {

using polydg::DgSpace;
using polydg::ElementField;
using polydg::MatrixXd;
using polydg::Vec2;

struct Rule {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre on [-1, 1] from the Jacobi matrix eigenproblem.
Rule gauss_1d(int n);
/// Fan from the first vertex, collapsed n x n Gauss on each triangle. The
/// polygon must be star-shaped with respect to its first vertex.
Rule polygon_rule(const std::vector<Vec2>& poly, int n);
Rule segment_rule(const Vec2& a, const Vec2& b, int n);

MatrixXd mass(const DgSpace& space, const ElementField& coeff);
MatrixXd elastic(const DgSpace& space, const ElementField& lambda, const ElementField& mu, double sigma0,
                 bool consistency = true);
MatrixXd divdiv(const DgSpace& space, const ElementField& m, double m0, bool include_sealed = false,
                bool consistency = true);
MatrixXd acoustic(const DgSpace& space, const ElementField& rho_a, double rho0, bool consistency = true);
/// rows: poro vector dofs, cols: acoustic dofs.
MatrixXd coupling(const DgSpace& poro, const DgSpace& acoustic, const ElementField& rho_a);
MatrixXd robin(const DgSpace& poro, const ElementField& eta_over_k);

/// max |a - b| / max |b|
double relative_gap(const MatrixXd& a, const MatrixXd& b);

}  // namespace oracle
