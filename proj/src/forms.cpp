#include "polydg/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polydg/parallel.hpp"

namespace polydg {

void PenaltyParams::validate() const {
  if (!(elastic > 0) || !(poro > 0) || !(acoustic > 0))
    throw std::invalid_argument("penalty parameters must be > 0");
}

namespace {

// Dense contribution on a set of global dofs.
struct Local {
  std::vector<int> rows;
  std::vector<int> cols;
  MatrixXd K;
};

SparseOperator merge(int n_rows, int n_cols, const std::vector<Local>& locals) {
  std::size_t nnz = 0;
  for (const auto& l : locals) nnz += static_cast<std::size_t>(l.K.size());
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (const auto& l : locals)
    for (int j = 0; j < static_cast<int>(l.cols.size()); ++j)
      for (int i = 0; i < static_cast<int>(l.rows.size()); ++i)
        if (l.K(i, j) != 0.0) t.push_back({l.rows[i], l.cols[j], l.K(i, j)});
  return SparseOperator::from_triplets(n_rows, n_cols, std::move(t));
}

std::vector<int> element_dofs(const DgSpace& space, int e) {
  std::vector<int> d(space.n_local(e));
  for (int i = 0; i < space.n_local(e); ++i) d[i] = space.offset(e) + i;
  return d;
}

void check_field(const DgSpace& space, const ElementField& f, const char* name) {
  if (static_cast<int>(f.size()) != space.mesh().n_elements())
    throw std::invalid_argument(std::string("coefficient field '") + name + "' has wrong length");
}

// Basis values and gradients of element e at a list of points (rows = points).
struct Tabulation {
  MatrixXd phi, dx, dy;
};

Tabulation tabulate(const DgSpace& space, int e, const std::vector<Vec2>& pts) {
  const int nb = space.n_basis(e);
  const int nq = static_cast<int>(pts.size());
  Tabulation t{MatrixXd(nq, nb), MatrixXd(nq, nb), MatrixXd(nq, nb)};
  VectorXd v(nb), gx(nb), gy(nb);
  for (int q = 0; q < nq; ++q) {
    eval_legendre_basis(space.degree(e), space.mesh().bbox(e), pts[q], v.data(), gx.data(), gy.data());
    t.phi.row(q) = v.transpose();
    t.dx.row(q) = gx.transpose();
    t.dy.row(q) = gy.transpose();
  }
  return t;
}

// Trace operators of one side: J maps local dofs to the trace values entering
// the jump, T to the flux entering the average. Rows are (point, component).
struct SideTrace {
  MatrixXd J, T;
};

enum class FormKind { elastic, divdiv, acoustic };

struct SideCoeffs {
  double a = 0.0;  // mu, m or rho_a
  double b = 0.0;  // lambda (elastic only)
};

int trace_components(FormKind k) { return k == FormKind::elastic ? 2 : 1; }

SideTrace side_trace(FormKind kind, const DgSpace& space, int e, const Tabulation& tab, const Vec2& n,
                     const SideCoeffs& c) {
  const int nq = static_cast<int>(tab.phi.rows());
  const int nb = static_cast<int>(tab.phi.cols());
  const int r = trace_components(kind);
  SideTrace s{MatrixXd::Zero(r * nq, space.n_local(e)), MatrixXd::Zero(r * nq, space.n_local(e))};
  for (int q = 0; q < nq; ++q) {
    for (int k = 0; k < nb; ++k) {
      const double f = tab.phi(q, k);
      const Vec2 g(tab.dx(q, k), tab.dy(q, k));
      switch (kind) {
        case FormKind::elastic:
          for (int comp = 0; comp < 2; ++comp) {
            const int col = comp * nb + k;
            // sigma(phi e_c) n = mu [(grad phi . n) e_c + n_c grad phi] + lambda d_c phi n
            const double gn = g.dot(n);
            for (int i = 0; i < 2; ++i) {
              s.J(2 * q + i, col) = (i == comp) ? f : 0.0;
              s.T(2 * q + i, col) = c.a * ((i == comp ? gn : 0.0) + n[comp] * g[i]) + c.b * g[comp] * n[i];
            }
          }
          break;
        case FormKind::divdiv:
          for (int comp = 0; comp < 2; ++comp) {
            const int col = comp * nb + k;
            s.J(q, col) = f * n[comp];
            s.T(q, col) = c.a * g[comp];
          }
          break;
        case FormKind::acoustic:
          s.J(q, k) = f;
          s.T(q, k) = c.a * g.dot(n);
          break;
      }
    }
  }
  return s;
}

struct FormCoeffs {
  FormKind kind;
  const ElementField* a;
  const ElementField* b;  // may be null
  ElementField penalty_coeff;
  double scale;
  bool include_sealed;
  bool consistency = true;
};

SideCoeffs side_coeffs(const FormCoeffs& fc, int e) {
  return {(*fc.a)[e], fc.b ? (*fc.b)[e] : 0.0};
}

VectorXd repeat_weights(const std::vector<double>& w, int r) {
  VectorXd out(static_cast<int>(w.size()) * r);
  for (int q = 0; q < static_cast<int>(w.size()); ++q)
    for (int i = 0; i < r; ++i) out[r * q + i] = w[q];
  return out;
}

Local face_local(const DgSpace& space, int f, FaceRole role, const FormCoeffs& fc) {
  const PolyMesh& mesh = space.mesh();
  const Face& face = mesh.face(f);
  const int r = trace_components(fc.kind);
  const double eta = face_penalty(space, f, fc.penalty_coeff, fc.scale);
  Local l;
  if (role == FaceRole::interior) {
    const int e0 = face.elements[0], e1 = face.elements[1];
    const auto rule = face_quadrature(mesh, f, space.degree(e0) + space.degree(e1) + 2);
    const Vec2 n = face.normal;
    const auto s0 = side_trace(fc.kind, space, e0, tabulate(space, e0, rule.points), n, side_coeffs(fc, e0));
    const auto s1 = side_trace(fc.kind, space, e1, tabulate(space, e1, rule.points), n, side_coeffs(fc, e1));
    const int n0 = space.n_local(e0), n1 = space.n_local(e1);
    MatrixXd J(s0.J.rows(), n0 + n1), A(s0.J.rows(), n0 + n1);
    J << s0.J, -s1.J;
    A << 0.5 * s0.T, 0.5 * s1.T;
    const VectorXd w = repeat_weights(rule.weights, r);
    const MatrixXd WJ = w.asDiagonal() * J;
    const MatrixXd cross = fc.consistency ? MatrixXd(A.transpose() * WJ) : MatrixXd::Zero(J.cols(), J.cols());
    l.K = eta * J.transpose() * WJ - cross - cross.transpose();
    l.rows = element_dofs(space, e0);
    const auto d1 = element_dofs(space, e1);
    l.rows.insert(l.rows.end(), d1.begin(), d1.end());
  } else {
    const int side = boundary_side(space, f);
    const int e = face.elements[side];
    const auto rule = face_quadrature(mesh, f, 2 * space.degree(e) + 2);
    const Vec2 n = mesh.outward_normal(f, e);
    const auto s = side_trace(fc.kind, space, e, tabulate(space, e, rule.points), n, side_coeffs(fc, e));
    const VectorXd w = repeat_weights(rule.weights, r);
    const MatrixXd WJ = w.asDiagonal() * s.J;
    const MatrixXd cross =
        fc.consistency ? MatrixXd(s.T.transpose() * WJ) : MatrixXd::Zero(s.J.cols(), s.J.cols());
    l.K = eta * s.J.transpose() * WJ - cross - cross.transpose();
    l.rows = element_dofs(space, e);
  }
  l.cols = l.rows;
  return l;
}

// Element matrix of the volume part of each form.
MatrixXd volume_local(FormKind kind, const DgSpace& space, int e, const SideCoeffs& c) {
  const ElementCache& ec = space.cache(e);
  const Eigen::Map<const VectorXd> w(ec.rule.weights.data(), ec.rule.size());
  const MatrixXd& gx = ec.dphi_x;
  const MatrixXd& gy = ec.dphi_y;
  const int nb = space.n_basis(e);
  const MatrixXd Wx = w.asDiagonal() * gx, Wy = w.asDiagonal() * gy;
  const MatrixXd xx = gx.transpose() * Wx, yy = gy.transpose() * Wy, xy = gx.transpose() * Wy;
  switch (kind) {
    case FormKind::acoustic:
      return c.a * (xx + yy);
    case FormKind::divdiv: {
      MatrixXd K(2 * nb, 2 * nb);
      K << xx, xy, xy.transpose(), yy;
      return c.a * K;
    }
    case FormKind::elastic: {
      // block(c,d)(k,l) = mu delta_cd grad.grad + mu d_d phi_k d_c phi_l + lambda d_c phi_k d_d phi_l
      const double mu = c.a, lam = c.b;
      const MatrixXd lap = xx + yy;
      MatrixXd K(2 * nb, 2 * nb);
      K.topLeftCorner(nb, nb) = mu * lap + (mu + lam) * xx;
      K.bottomRightCorner(nb, nb) = mu * lap + (mu + lam) * yy;
      K.topRightCorner(nb, nb) = mu * xy.transpose() + lam * xy;
      K.bottomLeftCorner(nb, nb) = K.topRightCorner(nb, nb).transpose();
      return K;
    }
  }
  return {};
}

SparseOperator assemble_sip(const DgSpace& space, const FormCoeffs& fc) {
  const PolyMesh& mesh = space.mesh();
  const auto& active = space.active_elements();
  std::vector<Local> locals(active.size() + mesh.n_faces());
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    locals[i] = {element_dofs(space, e), element_dofs(space, e), volume_local(fc.kind, space, e, side_coeffs(fc, e))};
  });
  std::vector<FaceRole> roles(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) roles[f] = face_role(space, f, fc.include_sealed);
  parallel_for(mesh.n_faces(), [&](int f) {
    if (roles[f] != FaceRole::skip) locals[active.size() + f] = face_local(space, f, roles[f], fc);
  });
  return merge(space.n_dofs(), space.n_dofs(), locals);
}

VectorXd dirichlet_load(const DgSpace& space, const FormCoeffs& fc,
                        const std::function<void(const Vec2& x, const Vec2& n, double* out)>& data) {
  const PolyMesh& mesh = space.mesh();
  const int r = trace_components(fc.kind);
  VectorXd b = VectorXd::Zero(space.n_dofs());
  std::vector<VectorXd> contrib(mesh.n_faces());
  parallel_for(mesh.n_faces(), [&](int f) {
    const Face& face = mesh.face(f);
    if (face.tag != FaceTag::dirichlet) return;
    if (face_role(space, f, fc.include_sealed) != FaceRole::boundary) return;
    const int e = face.elements[boundary_side(space, f)];
    const auto rule = face_quadrature(mesh, f, 2 * space.degree(e) + 4);
    const Vec2 n = mesh.outward_normal(f, e);
    const auto s = side_trace(fc.kind, space, e, tabulate(space, e, rule.points), n, side_coeffs(fc, e));
    VectorXd g(r * rule.size());
    for (int q = 0; q < rule.size(); ++q) {
      data(rule.points[q], n, g.data() + r * q);
      for (int i = 0; i < r; ++i) g[r * q + i] *= rule.weights[q];
    }
    const double eta = face_penalty(space, f, fc.penalty_coeff, fc.scale);
    contrib[f] = eta * s.J.transpose() * g - s.T.transpose() * g;
  });
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (contrib[f].size() == 0) continue;
    const int e = mesh.face(f).elements[boundary_side(space, f)];
    b.segment(space.offset(e), space.n_local(e)) += contrib[f];
  }
  return b;
}

ElementField elastic_penalty_coeff(const DgSpace& space, const ElementField& lambda, const ElementField& mu) {
  ElementField d(space.mesh().n_elements(), 0.0);
  for (int e : space.active_elements()) d[e] = stiffness_norm(ElasticMaterial{1.0, lambda[e], mu[e], 0.0});
  return d;
}

FormCoeffs elastic_coeffs(const DgSpace& space, const ElementField& lambda, const ElementField& mu, double sigma0) {
  check_field(space, lambda, "lambda");
  check_field(space, mu, "mu");
  if (space.components() != 2) throw std::invalid_argument("elastic form needs a vector space");
  if (!(sigma0 > 0)) throw std::invalid_argument("elastic penalty must be > 0");
  return {FormKind::elastic, &mu, &lambda, elastic_penalty_coeff(space, lambda, mu), sigma0, false};
}

FormCoeffs divdiv_coeffs(const DgSpace& space, const ElementField& m, double m0, bool include_sealed) {
  check_field(space, m, "m");
  if (space.components() != 2) throw std::invalid_argument("div-div form needs a vector space");
  if (!(m0 > 0)) throw std::invalid_argument("div-div penalty must be > 0");
  return {FormKind::divdiv, &m, nullptr, m, m0, include_sealed};
}

FormCoeffs acoustic_coeffs(const DgSpace& space, const ElementField& rho_a, double rho0) {
  check_field(space, rho_a, "rho_a");
  if (space.components() != 1) throw std::invalid_argument("acoustic form needs a scalar space");
  if (!(rho0 > 0)) throw std::invalid_argument("acoustic penalty must be > 0");
  return {FormKind::acoustic, &rho_a, nullptr, rho_a, rho0, false};
}

}  // namespace

// ---------------------------------------------------------------------------

FaceRole face_role(const DgSpace& space, int f, bool include_sealed) {
  const Face& face = space.mesh().face(f);
  const bool a0 = space.active(face.elements[0]);
  const bool a1 = !face.is_boundary() && space.active(face.elements[1]);
  if (a0 && a1) return FaceRole::interior;
  if (!a0 && !a1) return FaceRole::skip;
  switch (face.tag) {
    case FaceTag::dirichlet: return FaceRole::boundary;
    case FaceTag::neumann: return FaceRole::skip;
    case FaceTag::interface_open: return FaceRole::skip;
    case FaceTag::interface_sealed: return include_sealed ? FaceRole::boundary : FaceRole::skip;
    case FaceTag::interior:
    case FaceTag::unassigned:
      break;
  }
  throw std::invalid_argument("face " + std::to_string(f) + " at (" + std::to_string(face.midpoint.x()) + ", " +
                              std::to_string(face.midpoint.y()) + ") bounds the space but carries no boundary tag");
}

int boundary_side(const DgSpace& space, int f) {
  const Face& face = space.mesh().face(f);
  return space.active(face.elements[0]) ? 0 : 1;
}

double face_penalty(const DgSpace& space, int f, const ElementField& coeff, double scale) {
  const PolyMesh& mesh = space.mesh();
  const Face& face = mesh.face(f);
  double v = 0.0;
  for (int s = 0; s < 2; ++s) {
    const int e = face.elements[s];
    if (e < 0 || !space.active(e)) continue;
    const double p = space.degree(e);
    v = std::max(v, coeff[e] * p * p / mesh.diameter(e));
  }
  return scale * v;
}

SparseOperator assemble_mass(const DgSpace& space, const ElementField& coeff) {
  check_field(space, coeff, "mass coefficient");
  const auto& active = space.active_elements();
  std::vector<Local> locals(active.size());
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    const double c = coeff[e];
    if (c < 0) throw std::invalid_argument("mass coefficient must be >= 0");
    const ElementCache& ec = space.cache(e);
    const Eigen::Map<const VectorXd> w(ec.rule.weights.data(), ec.rule.size());
    const MatrixXd G = c * (ec.phi.transpose() * w.asDiagonal() * ec.phi);
    const int nb = space.n_basis(e);
    MatrixXd K = MatrixXd::Zero(space.n_local(e), space.n_local(e));
    for (int k = 0; k < space.components(); ++k) K.block(k * nb, k * nb, nb, nb) = G;
    locals[i] = {element_dofs(space, e), element_dofs(space, e), std::move(K)};
  });
  return merge(space.n_dofs(), space.n_dofs(), locals);
}

SparseOperator assemble_elastic(const DgSpace& space, const ElementField& lambda, const ElementField& mu,
                                double sigma0, bool consistency) {
  auto fc = elastic_coeffs(space, lambda, mu, sigma0);
  fc.consistency = consistency;
  return assemble_sip(space, fc);
}

SparseOperator assemble_divdiv(const DgSpace& space, const ElementField& m, double m0, bool include_sealed,
                               bool consistency) {
  auto fc = divdiv_coeffs(space, m, m0, include_sealed);
  fc.consistency = consistency;
  return assemble_sip(space, fc);
}

SparseOperator assemble_acoustic(const DgSpace& space, const ElementField& rho_a, double rho0, bool consistency) {
  auto fc = acoustic_coeffs(space, rho_a, rho0);
  fc.consistency = consistency;
  return assemble_sip(space, fc);
}

SparseOperator assemble_coupling(const DgSpace& poro, const DgSpace& acoustic, const ElementField& rho_a) {
  check_field(acoustic, rho_a, "rho_a");
  if (poro.components() != 2 || acoustic.components() != 1)
    throw std::invalid_argument("assemble_coupling: expects vector poro space and scalar acoustic space");
  const PolyMesh& mesh = poro.mesh();
  std::vector<Local> locals(mesh.n_faces());
  parallel_for(mesh.n_faces(), [&](int f) {
    const Face& face = mesh.face(f);
    if (!face.is_interface()) return;
    const int ep = face.elements[0], ea = face.elements[1];
    if (mesh.subdomain(ep) != Subdomain::poroelastic || mesh.subdomain(ea) != Subdomain::acoustic)
      throw std::logic_error("assemble_coupling: interface face " + std::to_string(f) +
                             " is not oriented from the poro side");
    if (!poro.active(ep) || !acoustic.active(ea)) return;
    const auto rule = face_quadrature(mesh, f, poro.degree(ep) + acoustic.degree(ea) + 2);
    const auto tp = tabulate(poro, ep, rule.points);
    const auto ta = tabulate(acoustic, ea, rule.points);
    const Vec2& n = face.normal;
    const int nb = poro.n_basis(ep);
    MatrixXd K(poro.n_local(ep), acoustic.n_local(ea));
    const Eigen::Map<const VectorXd> w(rule.weights.data(), rule.size());
    const MatrixXd base = rho_a[ea] * (tp.phi.transpose() * w.asDiagonal() * ta.phi);
    K.topRows(nb) = n.x() * base;
    K.bottomRows(nb) = n.y() * base;
    locals[f] = {element_dofs(poro, ep), element_dofs(acoustic, ea), std::move(K)};
  });
  return merge(poro.n_dofs(), acoustic.n_dofs(), locals);
}

SparseOperator assemble_robin_interface(const DgSpace& poro, const ElementField& eta_over_k) {
  const SparseOperator volume = assemble_mass(poro, eta_over_k);
  const PolyMesh& mesh = poro.mesh();
  std::vector<Local> locals(mesh.n_faces());
  parallel_for(mesh.n_faces(), [&](int f) {
    const Face& face = mesh.face(f);
    if (face.tag != FaceTag::interface_open) return;
    const int e = face.elements[0];
    if (!poro.active(e)) return;
    const double z = zeta_tau(face.tau);
    if (z == 0.0) return;
    const auto rule = face_quadrature(mesh, f, 2 * poro.degree(e) + 2);
    const auto t = tabulate(poro, e, rule.points);
    const int nb = poro.n_basis(e);
    MatrixXd J(rule.size(), 2 * nb);
    J << face.normal.x() * t.phi, face.normal.y() * t.phi;
    const Eigen::Map<const VectorXd> w(rule.weights.data(), rule.size());
    locals[f] = {element_dofs(poro, e), element_dofs(poro, e), z * (J.transpose() * w.asDiagonal() * J)};
  });
  return combine(1.0, volume, 1.0, merge(poro.n_dofs(), poro.n_dofs(), locals));
}

// ---------------------------------------------------------------------------

VectorXd assemble_load(const DgSpace& space, const VectorFn& f) {
  if (space.components() != 2) throw std::invalid_argument("assemble_load: vector load on scalar space");
  VectorXd b = VectorXd::Zero(space.n_dofs());
  const auto& active = space.active_elements();
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    const ElementCache& ec = space.cache(e);
    const int nb = space.n_basis(e);
    for (int q = 0; q < ec.rule.size(); ++q) {
      const Vec2 v = ec.rule.weights[q] * f(ec.rule.points[q]);
      b.segment(space.offset(e), nb) += v.x() * ec.phi.row(q).transpose();
      b.segment(space.offset(e) + nb, nb) += v.y() * ec.phi.row(q).transpose();
    }
  });
  return b;
}

VectorXd assemble_load(const DgSpace& space, const ScalarFn& f) {
  if (space.components() != 1) throw std::invalid_argument("assemble_load: scalar load on vector space");
  VectorXd b = VectorXd::Zero(space.n_dofs());
  const auto& active = space.active_elements();
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    const ElementCache& ec = space.cache(e);
    for (int q = 0; q < ec.rule.size(); ++q)
      b.segment(space.offset(e), space.n_basis(e)) += (ec.rule.weights[q] * f(ec.rule.points[q])) * ec.phi.row(q).transpose();
  });
  return b;
}

VectorXd elastic_dirichlet_load(const DgSpace& space, const ElementField& lambda, const ElementField& mu,
                                double sigma0, const VectorFn& g) {
  return dirichlet_load(space, elastic_coeffs(space, lambda, mu, sigma0), [&](const Vec2& x, const Vec2&, double* out) {
    const Vec2 v = g(x);
    out[0] = v.x();
    out[1] = v.y();
  });
}

VectorXd divdiv_dirichlet_load(const DgSpace& space, const ElementField& m, double m0, const VectorFn& g) {
  return dirichlet_load(space, divdiv_coeffs(space, m, m0, false),
                        [&](const Vec2& x, const Vec2& n, double* out) { out[0] = g(x).dot(n); });
}

VectorXd acoustic_dirichlet_load(const DgSpace& space, const ElementField& rho_a, double rho0, const ScalarFn& g) {
  return dirichlet_load(space, acoustic_coeffs(space, rho_a, rho0),
                        [&](const Vec2& x, const Vec2&, double* out) { out[0] = g(x); });
}

// ---------------------------------------------------------------------------

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::elastic: return "elastic";
    case ProblemKind::poro: return "poro";
    case ProblemKind::coupled: return "coupled";
  }
  return "?";
}

ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "elastic") return ProblemKind::elastic;
  if (s == "poro" || s == "poroelastic") return ProblemKind::poro;
  if (s == "coupled") return ProblemKind::coupled;
  throw std::invalid_argument("unknown problem kind '" + s + "'");
}

void LoadFunction::add(TimeFactor factor, VectorXd vector) {
  if (vector.size() != n_) throw std::invalid_argument("LoadFunction: vector length mismatch");
  terms_.push_back({std::move(factor), std::move(vector)});
}

VectorXd LoadFunction::operator()(double t) const {
  VectorXd s = VectorXd::Zero(n_);
  for (const auto& term : terms_) {
    const double c = term.factor(t);
    if (c != 0.0) s += c * term.vector;
  }
  return s;
}

DofBlocks BlockSystem::dof_blocks() const {
  DofBlocks blocks;
  const auto add_space = [&](const DgSpace& sp, const std::vector<int>& offsets) {
    for (int e : sp.active_elements()) {
      std::vector<int> b;
      for (int off : offsets)
        for (int i = 0; i < sp.n_local(e); ++i) b.push_back(off + sp.offset(e) + i);
      blocks.push_back(std::move(b));
    }
  };
  if (vector_space) {
    std::vector<int> offs{layout.u_offset};
    if (layout.n_w > 0) offs.push_back(layout.w_offset);
    add_space(*vector_space, offs);
  }
  if (acoustic_space) add_space(*acoustic_space, {layout.phi_offset});
  return blocks;
}

CoefficientFields coefficient_fields(const PolyMesh& mesh, const MaterialTable& materials) {
  const int n = mesh.n_elements();
  CoefficientFields c;
  for (auto* f : {&c.rho, &c.rho_f, &c.rho_w, &c.rho_u, &c.phi, &c.lambda, &c.mu, &c.zeta, &c.m, &c.beta, &c.eta_over_k, &c.rho_a,
                  &c.acoustic_mass})
    f->assign(n, 0.0);
  for (int e = 0; e < n; ++e) {
    switch (mesh.subdomain(e)) {
      case Subdomain::elastic: {
        const auto& m = materials.elastic(mesh, e);
        c.rho[e] = m.rho;
        c.lambda[e] = m.lambda;
        c.mu[e] = m.mu;
        c.zeta[e] = m.zeta;
        break;
      }
      case Subdomain::poroelastic: {
        const auto& m = materials.poro(mesh, e);
        const auto d = m.derived();
        c.rho[e] = d.rho;
        c.rho_f[e] = m.rho_f;
        c.rho_w[e] = d.rho_w;
        c.rho_u[e] = d.rho_u;
        c.phi[e] = m.phi;
        c.lambda[e] = m.lambda;
        c.mu[e] = m.mu;
        c.m[e] = m.m;
        c.beta[e] = m.beta;
        c.eta_over_k[e] = m.eta_over_k();
        break;
      }
      case Subdomain::acoustic: {
        const auto& m = materials.acoustic(mesh, e);
        c.rho_a[e] = m.rho_a;
        c.acoustic_mass[e] = m.rho_a / (m.c * m.c);
        break;
      }
    }
  }
  return c;
}

namespace {

// diag(r) A diag(c)
SparseOperator scale_rows_cols(const SparseOperator& A, const VectorXd& r, const VectorXd& c) {
  auto t = A.triplets();
  for (auto& e : t) e.value *= r[e.row] * c[e.col];
  return SparseOperator::from_triplets(A.rows(), A.cols(), std::move(t));
}

VectorXd dof_scaling(const DgSpace& space, const ElementField& f) {
  VectorXd s = VectorXd::Zero(space.n_dofs());
  for (int e : space.active_elements()) s.segment(space.offset(e), space.n_local(e)).setConstant(f[e]);
  return s;
}

ElementField product(const ElementField& a, const ElementField& b, double s = 1.0) {
  ElementField r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i] * b[i];
  return r;
}

}  // namespace

BlockSystem build_block_system(ProblemKind kind, std::shared_ptr<const PolyMesh> mesh, int degree,
                               const MaterialTable& materials, const PenaltyParams& pen) {
  pen.validate();
  materials.check_covers(*mesh);
  const CoefficientFields c = coefficient_fields(*mesh, materials);
  BlockSystem sys;
  sys.kind = kind;
  sys.coeffs = c;
  sys.penalties = pen;

  if (kind == ProblemKind::elastic) {
    auto V = DgSpace::uniform(mesh, degree, 2, {Subdomain::elastic});
    if (V->n_dofs() == 0) throw std::invalid_argument("elastic problem: mesh has no elastic elements");
    sys.vector_space = V;
    sys.layout = {0, V->n_dofs(), 0, 0, 0, 0};
    sys.parts.mass_rho = assemble_mass(*V, c.rho);
    sys.parts.elastic = assemble_elastic(*V, c.lambda, c.mu, pen.elastic);
    const ElementField rz = product(c.rho, c.zeta);
    sys.M = sys.parts.mass_rho;
    sys.D = assemble_mass(*V, product(rz, ElementField(c.rho.size(), 2.0)));
    sys.A = combine(1.0, sys.parts.elastic, 1.0, assemble_mass(*V, product(rz, c.zeta)));
    sys.load = LoadFunction(sys.size());
    return sys;
  }

  const bool coupled = kind == ProblemKind::coupled;
  auto V = DgSpace::uniform(mesh, degree, 2, {Subdomain::poroelastic});
  if (V->n_dofs() == 0) throw std::invalid_argument("poro problem: mesh has no poroelastic elements");
  sys.vector_space = V;
  const int nv = V->n_dofs();
  std::shared_ptr<DgSpace> Va;
  if (coupled) {
    Va = DgSpace::uniform(mesh, degree, 1, {Subdomain::acoustic});
    if (Va->n_dofs() == 0) throw std::invalid_argument("coupled problem: mesh has no acoustic elements");
    sys.acoustic_space = Va;
  }
  const int na = coupled ? Va->n_dofs() : 0;
  sys.layout = {0, nv, nv, nv, 2 * nv, na};

  auto& P = sys.parts;
  P.mass_rho = assemble_mass(*V, c.rho);
  P.mass_rho_f = assemble_mass(*V, c.rho_f);
  P.mass_rho_w = assemble_mass(*V, c.rho_w);
  P.elastic = assemble_elastic(*V, c.lambda, c.mu, pen.elastic);
  P.divdiv = assemble_divdiv(*V, c.m, pen.poro, coupled);
  P.mass_eta_over_k = assemble_mass(*V, c.eta_over_k);
  if (coupled) {
    P.robin = assemble_robin_interface(*V, c.eta_over_k);
    P.mass_acoustic = assemble_mass(*Va, c.acoustic_mass);
    P.acoustic = assemble_acoustic(*Va, c.rho_a, pen.acoustic);
    P.coupling = assemble_coupling(*V, *Va, c.rho_a);
  } else {
    P.robin = P.mass_eta_over_k;
  }

  const VectorXd sb = dof_scaling(*V, c.beta);
  const VectorXd one = VectorXd::Ones(nv);
  const int n = sys.size();
  BlockBuilder M(n, n), D(n, n), A(n, n);
  M.add(P.mass_rho, 0, 0);
  M.add(P.mass_rho_f, 0, nv);
  M.add(P.mass_rho_f, nv, 0);
  M.add(P.mass_rho_w, nv, nv);
  D.add(P.robin, nv, nv);
  A.add(P.elastic, 0, 0);
  A.add(scale_rows_cols(P.divdiv, sb, sb), 0, 0);
  A.add(scale_rows_cols(P.divdiv, sb, one), 0, nv);
  A.add(scale_rows_cols(P.divdiv, one, sb), nv, 0);
  A.add(P.divdiv, nv, nv);
  if (coupled) {
    const int pa = sys.layout.phi_offset;
    M.add(P.mass_acoustic, pa, pa);
    A.add(P.acoustic, pa, pa);
    D.add(P.coupling, 0, pa);
    D.add(P.coupling, nv, pa);
    D.add(P.coupling, pa, 0, -1.0, true);
    D.add(P.coupling, pa, nv, -1.0, true);
  }
  sys.M = std::move(M).build();
  sys.D = std::move(D).build();
  sys.A = std::move(A).build();
  sys.load = LoadFunction(n);
  return sys;
}

}  // namespace polydg
