#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polydg/fespace.hpp"
#include "polydg/linalg.hpp"
#include "polydg/materials.hpp"

namespace polydg {

/// Penalty scalings for the elastic, div-div and acoustic forms.
struct PenaltyParams {
  double elastic = 10.0;
  double poro = 10.0;
  double acoustic = 10.0;

  void validate() const;
};

/// One value per mesh element; entries on elements outside the space are ignored.
using ElementField = std::vector<double>;

/// How a face enters the face integrals of a form on `space`.
enum class FaceRole { skip, interior, boundary };

/// Interior when both neighbours are active. A boundary face of the space is
/// kept when it is Dirichlet, or when it is a sealed interface and
/// `include_sealed` is set. Neumann faces and other interface faces are
/// skipped. Throws for an unassigned boundary face.
FaceRole face_role(const DgSpace& space, int face, bool include_sealed = false);

/// scale * max over the active neighbours of coeff * p^2 / h.
double face_penalty(const DgSpace& space, int face, const ElementField& coeff, double scale);

/// Element side of `face` that carries the boundary trace (for FaceRole::boundary).
int boundary_side(const DgSpace& space, int face);

// ---------------------------------------------------------------------------
// Operators

SparseOperator assemble_mass(const DgSpace& space, const ElementField& coeff);

/// Symmetric interior penalty form of linear elasticity. Penalty coefficient
/// on each element is the stiffness norm 2 lambda + 2 mu.
/// Without `consistency` only the volume and penalty terms are kept (the
/// matrix of the squared DG norm).
SparseOperator assemble_elastic(const DgSpace& space, const ElementField& lambda, const ElementField& mu,
                                double sigma0, bool consistency = true);

/// (m div w, div z) with interior penalty on normal jumps. Sealed interface
/// faces are added to the face set when `include_sealed` is set.
SparseOperator assemble_divdiv(const DgSpace& space, const ElementField& m, double m0, bool include_sealed = false,
                               bool consistency = true);

/// Scalar interior penalty form (rho_a grad phi, grad psi).
SparseOperator assemble_acoustic(const DgSpace& space, const ElementField& rho_a, double rho0,
                                 bool consistency = true);

/// Rows: vector poro dofs, columns: acoustic dofs. Entry = int_{interface} rho_a psi_j (v_i . n_p).
SparseOperator assemble_coupling(const DgSpace& poro, const DgSpace& acoustic, const ElementField& rho_a);

/// (eta/k w, z) plus zeta_tau (w.n)(z.n) on open interface faces.
SparseOperator assemble_robin_interface(const DgSpace& poro, const ElementField& eta_over_k);

// ---------------------------------------------------------------------------
// Load vectors

/// Moments int f . v over every active element.
VectorXd assemble_load(const DgSpace& space, const VectorFn& f);
VectorXd assemble_load(const DgSpace& space, const ScalarFn& f);

/// Nitsche data term of the elastic form for Dirichlet data g:
///   -int g . sigma(v) n + int eta g . v   over Dirichlet faces.
VectorXd elastic_dirichlet_load(const DgSpace& space, const ElementField& lambda, const ElementField& mu,
                                double sigma0, const VectorFn& g);

/// Div-div data term for normal data g . n on Dirichlet faces:
///   -int (g.n) m div z + int gamma (g.n)(z.n).
VectorXd divdiv_dirichlet_load(const DgSpace& space, const ElementField& m, double m0, const VectorFn& g);

VectorXd acoustic_dirichlet_load(const DgSpace& space, const ElementField& rho_a, double rho0, const ScalarFn& g);

// ---------------------------------------------------------------------------
// Block systems

enum class ProblemKind { elastic, poro, coupled };

std::string to_string(ProblemKind k);
ProblemKind problem_kind_from_string(const std::string& s);

/// Sum of separable terms factor(t) * vector.
class LoadFunction {
 public:
  using TimeFactor = std::function<double(double)>;

  LoadFunction() = default;
  explicit LoadFunction(int n) : n_(n) {}

  void add(TimeFactor factor, VectorXd vector);
  VectorXd operator()(double t) const;
  int size() const { return n_; }
  bool empty() const { return terms_.empty(); }
  std::size_t n_terms() const { return terms_.size(); }

 private:
  struct Term {
    TimeFactor factor;
    VectorXd vector;
  };
  int n_ = 0;
  std::vector<Term> terms_;
};

/// Offsets of the u, w and phi unknowns in the global vector.
struct BlockLayout {
  int u_offset = 0, n_u = 0;
  int w_offset = 0, n_w = 0;
  int phi_offset = 0, n_phi = 0;

  int size() const { return n_u + n_w + n_phi; }
};

/// Pieces kept for diagnostics, energies and tests.
struct BlockParts {
  SparseOperator mass_rho, mass_rho_f, mass_rho_w, mass_acoustic;
  SparseOperator elastic, divdiv, acoustic;
  SparseOperator coupling, robin;  // robin = mass_eta_over_k (+ open-interface term when coupled)
  SparseOperator mass_eta_over_k;
};

/// Per-element coefficient fields pulled from the material table.
struct CoefficientFields {
  ElementField rho, rho_f, rho_w, rho_u, phi, lambda, mu, zeta, m, beta, eta_over_k, rho_a, acoustic_mass;
};
CoefficientFields coefficient_fields(const PolyMesh& mesh, const MaterialTable& materials);

/// M X'' + D X' + A X = S(t).
struct BlockSystem {
  ProblemKind kind = ProblemKind::elastic;
  std::shared_ptr<const DgSpace> vector_space;    // u (and w)
  std::shared_ptr<const DgSpace> acoustic_space;  // phi, coupled only
  BlockLayout layout;
  SparseOperator M, D, A;
  LoadFunction load;
  BlockParts parts;
  CoefficientFields coeffs;
  PenaltyParams penalties;

  int size() const { return layout.size(); }
  /// Per-element groups of all unknowns living on that element.
  DofBlocks dof_blocks() const;
};

/// Assembles M, D, A for the chosen kind. The load is left empty.
///   elastic: M_rho, D = M_{2 rho zeta}, A = A^e + M_{rho zeta^2}
///   poro:    [[M_rho, M_rho_f], [M_rho_f, M_rho_w]], D = diag(0, M_{eta/k}),
///            A = [[A^e + beta^2 A^p, beta A^p], [beta A^p, A^p]]
///   coupled: poro blocks plus M_{rho_a/c^2}, A^a and the interface blocks
///            D = [[0, 0, C], [0, B, C], [-C^T, -C^T, 0]].
BlockSystem build_block_system(ProblemKind kind, std::shared_ptr<const PolyMesh> mesh, int degree,
                               const MaterialTable& materials, const PenaltyParams& penalties);


}  // namespace polydg
