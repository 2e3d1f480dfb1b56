#include "dense_oracle.hpp"

#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "polydg/materials.hpp"

namespace oracle {

using polydg::Face;
using polydg::FaceTag;
using polydg::Mat2;
using polydg::PolyMesh;
using polydg::VectorXd;

namespace {

constexpr int kPoints = 8;

// Values and gradients of every local dof of element e at x. For vector
// spaces dof (c, k) is phi_k e_c, so its "value" is a vector.
struct LocalBasis {
  std::vector<Vec2> value;  // vector spaces
  std::vector<Mat2> grad;   // row c = gradient of component c
  std::vector<double> svalue;  // scalar spaces
  std::vector<Vec2> sgrad;
  int size() const { return static_cast<int>(std::max(value.size(), svalue.size())); }
};

LocalBasis basis_at(const DgSpace& sp, int e, const Vec2& x) {
  VectorXd v, dx, dy;
  sp.eval(e, x, v, dx, dy);
  const int nb = sp.n_basis(e);
  LocalBasis b;
  if (sp.components() == 1) {
    for (int k = 0; k < nb; ++k) {
      b.svalue.push_back(v[k]);
      b.sgrad.emplace_back(dx[k], dy[k]);
    }
    return b;
  }
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < nb; ++k) {
      Vec2 val = Vec2::Zero();
      val[c] = v[k];
      Mat2 g = Mat2::Zero();
      g(c, 0) = dx[k];
      g(c, 1) = dy[k];
      b.value.push_back(val);
      b.grad.push_back(g);
    }
  return b;
}

std::vector<Vec2> loop_of(const PolyMesh& mesh, int e) {
  std::vector<Vec2> p;
  for (int v : mesh.element(e)) p.push_back(mesh.vertex(v));
  return p;
}

double diameter(const PolyMesh& mesh, int e) {
  const auto p = loop_of(mesh, e);
  double d = 0.0;
  for (const auto& a : p)
    for (const auto& b : p) d = std::max(d, (a - b).norm());
  return d;
}

Mat2 stress(const Mat2& g, double lambda, double mu) {
  const Mat2 eps = 0.5 * (g + g.transpose());
  return 2.0 * mu * eps + lambda * eps.trace() * Mat2::Identity();
}

double frob(const Mat2& a, const Mat2& b) { return (a.array() * b.array()).sum(); }

Mat2 outer(const Vec2& a, const Vec2& b) { return a * b.transpose(); }

// One side of a face seen by a form: element, outward normal, and whether
// the element carries dofs of the space.
struct Side {
  int e = -1;
  Vec2 n = Vec2::Zero();
};

enum class Role { skip, interior, boundary };

Role role_of(const DgSpace& sp, const Face& f, bool include_sealed, std::vector<Side>& sides) {
  sides.clear();
  for (int s = 0; s < 2; ++s) {
    const int e = f.elements[s];
    if (e >= 0 && sp.active(e)) sides.push_back({e, s == 0 ? f.normal : Vec2(-f.normal)});
  }
  if (sides.size() == 2) return Role::interior;
  if (sides.empty()) return Role::skip;
  if (f.tag == FaceTag::dirichlet) return Role::boundary;
  if (f.tag == FaceTag::interface_sealed && include_sealed) return Role::boundary;
  return Role::skip;
}

double penalty(const DgSpace& sp, const std::vector<Side>& sides, const ElementField& coeff, double scale) {
  double v = 0.0;
  for (const auto& s : sides) {
    const double p = sp.degree(s.e);
    v = std::max(v, coeff[s.e] * p * p / diameter(sp.mesh(), s.e));
  }
  return scale * v;
}

// Global dof index of local dof i of element e.
int gdof(const DgSpace& sp, int e, int i) { return sp.offset(e) + i; }

// Traces on one side for a pointwise face integrand: jump contribution and
// average contribution of a single basis function living on that side.
template <class Volume, class FaceTerm>
MatrixXd sip(const DgSpace& sp, bool include_sealed, Volume&& volume, FaceTerm&& face_term) {
  const PolyMesh& mesh = sp.mesh();
  MatrixXd K = MatrixXd::Zero(sp.n_dofs(), sp.n_dofs());
  for (int e : sp.active_elements()) {
    const Rule r = polygon_rule(loop_of(mesh, e), kPoints);
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const LocalBasis b = basis_at(sp, e, r.points[q]);
      for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
          K(gdof(sp, e, i), gdof(sp, e, j)) += r.weights[q] * volume(e, b, j, i);
    }
  }
  std::vector<Side> sides;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Role role = role_of(sp, face, include_sealed, sides);
    if (role == Role::skip) continue;
    const Rule r = segment_rule(mesh.vertex(face.vertices[0]), mesh.vertex(face.vertices[1]), kPoints);
    const double avg = role == Role::interior ? 0.5 : 1.0;
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      std::vector<LocalBasis> bs;
      for (const auto& s : sides) bs.push_back(basis_at(sp, s.e, r.points[q]));
      for (std::size_t a = 0; a < sides.size(); ++a)
        for (std::size_t c = 0; c < sides.size(); ++c)
          for (int i = 0; i < bs[a].size(); ++i)
            for (int j = 0; j < bs[c].size(); ++j)
              K(gdof(sp, sides[a].e, i), gdof(sp, sides[c].e, j)) +=
                  r.weights[q] * face_term(sides, bs, c, j, a, i, avg);
    }
  }
  return K;
}

}  // namespace

Rule gauss_1d(int n) {
  MatrixXd T = MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) T(k - 1, k) = T(k, k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
  Rule r;
  for (int i = 0; i < n; ++i) {
    r.points.emplace_back(es.eigenvalues()[i], 0.0);
    r.weights.push_back(2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return r;
}

Rule polygon_rule(const std::vector<Vec2>& poly, int n) {
  const Rule g = gauss_1d(n);
  Rule r;
  for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
    const Vec2 &a = poly[0], &b = poly[t], &c = poly[t + 1];
    const double jac = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double s = 0.5 * (g.points[i].x() + 1.0), u = 0.5 * (g.points[j].x() + 1.0);
        // (s, u) in the square -> (s, (1 - s) u) in the reference triangle
        const double xi = s, eta = (1.0 - s) * u;
        r.points.push_back(a + xi * (b - a) + eta * (c - a));
        r.weights.push_back(0.25 * g.weights[i] * g.weights[j] * (1.0 - s) * jac);
      }
  }
  return r;
}

Rule segment_rule(const Vec2& a, const Vec2& b, int n) {
  const Rule g = gauss_1d(n);
  Rule r;
  const double half = 0.5 * (b - a).norm();
  for (int i = 0; i < n; ++i) {
    r.points.push_back(0.5 * (a + b) + 0.5 * g.points[i].x() * (b - a));
    r.weights.push_back(half * g.weights[i]);
  }
  return r;
}

MatrixXd mass(const DgSpace& sp, const ElementField& coeff) {
  return sip(
      sp, false,
      [&](int e, const LocalBasis& b, int j, int i) {
        return coeff[e] * (sp.components() == 1 ? b.svalue[j] * b.svalue[i] : b.value[j].dot(b.value[i]));
      },
      [](auto&&...) { return 0.0; });
}

MatrixXd elastic(const DgSpace& sp, const ElementField& lambda, const ElementField& mu, double sigma0,
                 bool consistency) {
  ElementField coeff(lambda.size());
  for (std::size_t e = 0; e < coeff.size(); ++e) coeff[e] = 2.0 * lambda[e] + 2.0 * mu[e];
  return sip(
      sp, false,
      [&](int e, const LocalBasis& b, int j, int i) {
        return frob(stress(b.grad[j], lambda[e], mu[e]), 0.5 * (b.grad[i] + b.grad[i].transpose()));
      },
      [&](const std::vector<Side>& s, const std::vector<LocalBasis>& b, int cu, int j, int cv, int i, double avg) {
        const Mat2 ju = outer(b[cu].value[j], s[cu].n), jv = outer(b[cv].value[i], s[cv].n);
        const Mat2 su = avg * stress(b[cu].grad[j], lambda[s[cu].e], mu[s[cu].e]);
        const Mat2 sv = avg * stress(b[cv].grad[i], lambda[s[cv].e], mu[s[cv].e]);
        const double eta = penalty(sp, s, coeff, sigma0);
        return eta * frob(ju, jv) - (consistency ? frob(su, jv) + frob(ju, sv) : 0.0);
      });
}

MatrixXd divdiv(const DgSpace& sp, const ElementField& m, double m0, bool include_sealed, bool consistency) {
  return sip(
      sp, include_sealed,
      [&](int e, const LocalBasis& b, int j, int i) { return m[e] * b.grad[j].trace() * b.grad[i].trace(); },
      [&](const std::vector<Side>& s, const std::vector<LocalBasis>& b, int cu, int j, int cv, int i, double avg) {
        const double ju = b[cu].value[j].dot(s[cu].n), jv = b[cv].value[i].dot(s[cv].n);
        const double du = avg * m[s[cu].e] * b[cu].grad[j].trace();
        const double dv = avg * m[s[cv].e] * b[cv].grad[i].trace();
        return penalty(sp, s, m, m0) * ju * jv - (consistency ? du * jv + ju * dv : 0.0);
      });
}

MatrixXd acoustic(const DgSpace& sp, const ElementField& rho_a, double rho0, bool consistency) {
  return sip(
      sp, false,
      [&](int e, const LocalBasis& b, int j, int i) { return rho_a[e] * b.sgrad[j].dot(b.sgrad[i]); },
      [&](const std::vector<Side>& s, const std::vector<LocalBasis>& b, int cu, int j, int cv, int i, double avg) {
        const Vec2 ju = b[cu].svalue[j] * s[cu].n, jv = b[cv].svalue[i] * s[cv].n;
        const Vec2 gu = avg * rho_a[s[cu].e] * b[cu].sgrad[j], gv = avg * rho_a[s[cv].e] * b[cv].sgrad[i];
        return penalty(sp, s, rho_a, rho0) * ju.dot(jv) - (consistency ? gu.dot(jv) + ju.dot(gv) : 0.0);
      });
}

MatrixXd coupling(const DgSpace& poro, const DgSpace& ac, const ElementField& rho_a) {
  const PolyMesh& mesh = poro.mesh();
  MatrixXd C = MatrixXd::Zero(poro.n_dofs(), ac.n_dofs());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.is_boundary()) continue;
    int ep = -1, ea = -1;
    Vec2 np = face.normal;
    if (poro.active(face.elements[0]) && ac.active(face.elements[1])) {
      ep = face.elements[0];
      ea = face.elements[1];
    } else if (poro.active(face.elements[1]) && ac.active(face.elements[0])) {
      ep = face.elements[1];
      ea = face.elements[0];
      np = -np;
    } else {
      continue;
    }
    const Rule r = segment_rule(mesh.vertex(face.vertices[0]), mesh.vertex(face.vertices[1]), kPoints);
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const LocalBasis bp = basis_at(poro, ep, r.points[q]), ba = basis_at(ac, ea, r.points[q]);
      for (int i = 0; i < bp.size(); ++i)
        for (int j = 0; j < ba.size(); ++j)
          C(gdof(poro, ep, i), gdof(ac, ea, j)) += r.weights[q] * rho_a[ea] * ba.svalue[j] * bp.value[i].dot(np);
    }
  }
  return C;
}

MatrixXd robin(const DgSpace& poro, const ElementField& eta_over_k) {
  MatrixXd B = mass(poro, eta_over_k);
  const PolyMesh& mesh = poro.mesh();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.tag != FaceTag::interface_open) continue;
    const int ep = poro.active(face.elements[0]) ? face.elements[0] : face.elements[1];
    const double z = (1.0 - face.tau) / face.tau;
    const Rule r = segment_rule(mesh.vertex(face.vertices[0]), mesh.vertex(face.vertices[1]), kPoints);
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const LocalBasis b = basis_at(poro, ep, r.points[q]);
      for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
          B(gdof(poro, ep, i), gdof(poro, ep, j)) +=
              r.weights[q] * z * b.value[j].dot(face.normal) * b.value[i].dot(face.normal);
    }
  }
  return B;
}

double relative_gap(const MatrixXd& a, const MatrixXd& b) {
  const double scale = b.cwiseAbs().maxCoeff();
  return (a - b).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

}  // namespace oracle
