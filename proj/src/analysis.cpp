#include "polydg/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "polydg/parallel.hpp"

namespace polydg {

namespace {

// Value and gradient of a (vector or scalar) field at a point. Scalars use
// v.x() and the first row of G.
struct Sample {
  Vec2 v = Vec2::Zero();
  Mat2 G = Mat2::Zero();
};

Sample operator-(const Sample& a, const Sample& b) { return {a.v - b.v, a.G - b.G}; }

struct ExactRef {
  const VectorGradFn* vec = nullptr;
  const ScalarGradFn* scal = nullptr;

  Sample operator()(const Vec2& x) const {
    Sample s;
    if (vec && *vec) {
      auto [v, G] = (*vec)(x);
      s.v = v;
      s.G = G;
    } else if (scal && *scal) {
      auto [v, g] = (*scal)(x);
      s.v.x() = v;
      s.G.row(0) = g.transpose();
    }
    return s;
  }
};

Sample discrete_sample(const DgSpace& sp, const VectorXd& c, int e, const Vec2& x) {
  VectorXd b, bx, by;
  sp.eval(e, x, b, bx, by);
  const int nb = sp.n_basis(e);
  Sample s;
  for (int comp = 0; comp < sp.components(); ++comp) {
    const auto seg = c.segment(sp.offset(e) + comp * nb, nb);
    s.v[comp] = b.dot(seg);
    s.G(comp, 0) = bx.dot(seg);
    s.G(comp, 1) = by.dot(seg);
  }
  return s;
}

void check_vector(const DgSpace& sp, const VectorXd& v) {
  if (v.size() != sp.n_dofs()) throw std::invalid_argument("coefficient vector does not match the space");
}

// sum over active elements of int integrand(e, exact - discrete)
double volume_sum(const DgSpace& sp, const VectorXd& c, const ExactRef& ex,
                  const std::function<double(int, const Sample&)>& integrand) {
  check_vector(sp, c);
  const auto& active = sp.active_elements();
  std::vector<double> part(active.size(), 0.0);
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    const auto rule = element_quadrature(sp.mesh(), e, 2 * sp.degree(e) + 4);
    double s = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2& x = rule.points[q];
      s += rule.weights[q] * integrand(e, ex(x) - discrete_sample(sp, c, e, x));
    }
    part[i] = s;
  });
  double total = 0.0;
  for (double v : part) total += v;
  return total;
}

enum class FaceSet { interior_and_dirichlet, sealed };

// sum over faces of penalty * int jump2(error jump, n)
double face_sum(const DgSpace& sp, const VectorXd& c, const ExactRef& ex, FaceSet set, const ElementField& coeff,
                double scale, const std::function<double(const Sample&, const Vec2&)>& jump2) {
  check_vector(sp, c);
  const PolyMesh& mesh = sp.mesh();
  std::vector<double> part(mesh.n_faces(), 0.0);
  parallel_for(mesh.n_faces(), [&](int f) {
    const Face& face = mesh.face(f);
    const FaceRole role = face_role(sp, f, set == FaceSet::sealed);
    if (role == FaceRole::skip) return;
    if (set == FaceSet::sealed && (role != FaceRole::boundary || face.tag != FaceTag::interface_sealed)) return;
    if (set == FaceSet::interior_and_dirichlet && role == FaceRole::boundary && face.tag != FaceTag::dirichlet) return;
    const double pen = face_penalty(sp, f, coeff, scale);
    double s = 0.0;
    if (role == FaceRole::interior) {
      const int e0 = face.elements[0], e1 = face.elements[1];
      const auto rule = face_quadrature(mesh, f, sp.degree(e0) + sp.degree(e1) + 4);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2& x = rule.points[q];
        const Sample exact = ex(x);
        const Sample jump = (exact - discrete_sample(sp, c, e0, x)) - (exact - discrete_sample(sp, c, e1, x));
        s += rule.weights[q] * jump2(jump, face.normal);
      }
    } else {
      const int e = face.elements[boundary_side(sp, f)];
      const Vec2 n = mesh.outward_normal(f, e);
      const auto rule = face_quadrature(mesh, f, 2 * sp.degree(e) + 4);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2& x = rule.points[q];
        s += rule.weights[q] * jump2(ex(x) - discrete_sample(sp, c, e, x), n);
      }
    }
    part[f] = pen * s;
  });
  double total = 0.0;
  for (double v : part) total += v;
  return total;
}

ElementField stiffness_coeff(const DgSpace& sp, const ElementField& lambda, const ElementField& mu) {
  ElementField d(sp.mesh().n_elements(), 0.0);
  for (int e : sp.active_elements()) d[e] = stiffness_norm(ElasticMaterial{1.0, lambda[e], mu[e], 0.0});
  return d;
}

double sq_norm(const Sample& s, int components) {
  return components == 2 ? s.v.squaredNorm() : s.v.x() * s.v.x();
}

}  // namespace

double dg_norm_elastic_sq(const DgSpace& sp, const ElementField& lambda, const ElementField& mu, double sigma0,
                          const VectorXd& v, const VectorGradFn& exact) {
  const ExactRef ex{&exact, nullptr};
  const double vol = volume_sum(sp, v, ex, [&](int e, const Sample& s) {
    const Mat2 eps = 0.5 * (s.G + s.G.transpose());
    const double tr = eps.trace();
    return 2.0 * mu[e] * eps.squaredNorm() + lambda[e] * tr * tr;
  });
  const double faces = face_sum(sp, v, ex, FaceSet::interior_and_dirichlet, stiffness_coeff(sp, lambda, mu), sigma0,
                                [](const Sample& j, const Vec2&) { return j.v.squaredNorm(); });
  return vol + faces;
}

double dg_seminorm_poro_sq(const DgSpace& sp, const ElementField& m, double m0, const VectorXd& z,
                           const VectorGradFn& exact) {
  const ExactRef ex{&exact, nullptr};
  const double vol = volume_sum(sp, z, ex, [&](int e, const Sample& s) {
    const double d = s.G.trace();
    return m[e] * d * d;
  });
  const double faces = face_sum(sp, z, ex, FaceSet::interior_and_dirichlet, m, m0, [](const Sample& j, const Vec2& n) {
    const double jn = j.v.dot(n);
    return jn * jn;
  });
  return vol + faces;
}

double dg_norm_acoustic_sq(const DgSpace& sp, const ElementField& rho_a, double rho0, const VectorXd& phi,
                           const ScalarGradFn& exact) {
  const ExactRef ex{nullptr, &exact};
  const double vol =
      volume_sum(sp, phi, ex, [&](int e, const Sample& s) { return rho_a[e] * s.G.row(0).squaredNorm(); });
  const double faces = face_sum(sp, phi, ex, FaceSet::interior_and_dirichlet, rho_a, rho0,
                                [](const Sample& j, const Vec2&) { return j.v.x() * j.v.x(); });
  return vol + faces;
}

double sealed_interface_sq(const DgSpace& sp, const ElementField& m, double m0, const VectorXd& z,
                           const VectorGradFn& exact) {
  return face_sum(sp, z, ExactRef{&exact, nullptr}, FaceSet::sealed, m, m0, [](const Sample& j, const Vec2& n) {
    const double jn = j.v.dot(n);
    return jn * jn;
  });
}

double l2_error_sq(const DgSpace& sp, const VectorXd& v, const VectorGradFn& exact, const ElementField* coeff) {
  const int nc = sp.components();
  return volume_sum(sp, v, ExactRef{&exact, nullptr},
                    [&](int e, const Sample& s) { return (coeff ? (*coeff)[e] : 1.0) * sq_norm(s, nc); });
}

double l2_error_sq(const DgSpace& sp, const VectorXd& v, const ScalarGradFn& exact, const ElementField* coeff) {
  const int nc = sp.components();
  return volume_sum(sp, v, ExactRef{nullptr, &exact},
                    [&](int e, const Sample& s) { return (coeff ? (*coeff)[e] : 1.0) * sq_norm(s, nc); });
}

// ---------------------------------------------------------------------------

AlgebraicEnergy algebraic_energy(const BlockSystem& sys, const State& s) {
  if (s.X.size() != sys.size() || s.Z.size() != sys.size()) throw std::invalid_argument("energy: state size mismatch");
  AlgebraicEnergy b;
  b.kinetic = 0.5 * s.Z.dot(sys.M * s.Z);
  const double potential = 0.5 * s.X.dot(sys.A * s.X);
  if (sys.kind == ProblemKind::elastic) {
    b.elastic = potential;
    return b;
  }
  const auto& L = sys.layout;
  const VectorXd u = s.X.segment(L.u_offset, L.n_u);
  b.elastic = 0.5 * u.dot(sys.parts.elastic * u);
  if (L.n_phi > 0) {
    const VectorXd phi = s.X.segment(L.phi_offset, L.n_phi);
    b.acoustic = 0.5 * phi.dot(sys.parts.acoustic * phi);
  }
  b.poro = potential - b.elastic - b.acoustic;
  return b;
}

void EnergyAccumulators::advance(const BlockSystem& sys, const State& s) {
  if (sys.kind == ProblemKind::elastic) return;
  const auto& L = sys.layout;
  const VectorXd Zw = s.Z.segment(L.w_offset, L.n_w);
  const double vol = Zw.dot(sys.parts.mass_eta_over_k * Zw);
  const double face = sys.kind == ProblemKind::coupled ? Zw.dot(sys.parts.robin * Zw) - vol : 0.0;
  if (!started_) {
    const VectorXd Xw = s.X.segment(L.w_offset, L.n_w);
    initial_filtration = Xw.dot(sys.parts.mass_eta_over_k * Xw);
    started_ = true;
  } else {
    const double dt = s.t - last_t_;
    filtration_integral += 0.5 * dt * (vol + last_filtration_);
    interface_integral += 0.5 * dt * (face + last_interface_);
  }
  last_t_ = s.t;
  last_filtration_ = vol;
  last_interface_ = face;
}

namespace {

VectorXd scale_by_element(const DgSpace& sp, const VectorXd& v, const ElementField& f) {
  VectorXd r = v;
  for (int e : sp.active_elements()) r.segment(sp.offset(e), sp.n_local(e)) *= f[e];
  return r;
}

ElementField reciprocal(const ElementField& f) {
  ElementField r(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i] != 0.0 ? 1.0 / f[i] : 0.0;
  return r;
}

ElementField product(const ElementField& a, const ElementField& b) {
  ElementField r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

}  // namespace

EnergyBreakdown energy_breakdown(const BlockSystem& sys, const State& s, const EnergyAccumulators& acc) {
  const DgSpace& V = *sys.vector_space;
  const auto& c = sys.coeffs;
  const auto& pen = sys.penalties;
  const auto& L = sys.layout;
  const VectorXd Xu = s.X.segment(L.u_offset, L.n_u), Zu = s.Z.segment(L.u_offset, L.n_u);
  EnergyBreakdown b;
  b.dg_elastic = dg_norm_elastic_sq(V, c.lambda, c.mu, pen.elastic, Xu);
  if (sys.kind == ProblemKind::elastic) {
    const ElementField rzz = product(product(c.rho, c.zeta), c.zeta);
    b.kinetic = l2_error_sq(V, Zu, VectorGradFn{}, &c.rho);
    b.damping_mass = l2_error_sq(V, Xu, VectorGradFn{}, &rzz);
    return b;
  }
  const VectorXd Xw = s.X.segment(L.w_offset, L.n_w), Zw = s.Z.segment(L.w_offset, L.n_w);
  const ElementField rfp = product(c.rho_f, c.phi);
  b.kinetic = l2_error_sq(V, Zu, VectorGradFn{}, &c.rho_u) +
              l2_error_sq(V, Zu + scale_by_element(V, Zw, reciprocal(c.phi)), VectorGradFn{}, &rfp);
  b.dg_poro = dg_seminorm_poro_sq(V, c.m, pen.poro, scale_by_element(V, Xu, c.beta) + Xw);
  b.initial_filtration = acc.initial_filtration;
  b.filtration_integral = acc.filtration_integral;
  b.interface_integral = acc.interface_integral;
  if (sys.kind == ProblemKind::coupled) {
    const DgSpace& Va = *sys.acoustic_space;
    const VectorXd Xp = s.X.segment(L.phi_offset, L.n_phi), Zp = s.Z.segment(L.phi_offset, L.n_phi);
    b.kinetic += l2_error_sq(Va, Zp, ScalarGradFn{}, &c.acoustic_mass);
    b.dg_acoustic = dg_norm_acoustic_sq(Va, c.rho_a, pen.acoustic, Xp);
    b.sealed = sealed_interface_sq(V, c.m, pen.poro, Xw);
  }
  return b;
}

void EnergyMonitor::operator()(const State& s) {
  const bool loaded = !sys_->load.empty();
  VectorXd load = loaded ? sys_->load(s.t) : VectorXd();
  if (last_) {
    const double dt = s.t - last_->t;
    const VectorXd Zm = 0.5 * (last_->Z + s.Z);
    dissipated_ += dt * Zm.dot(sys_->D * Zm);
    if (loaded) {
      const double w = dt * Zm.dot(0.5 * (last_load_ + load));
      work_ += w;
      work_abs_ += std::abs(w);
    }
  }
  last_load_ = std::move(load);
  acc_.advance(*sys_, s);
  last_ = s;
  if (cadence_ > 1 && s.step % cadence_ != 0) return;
  AlgebraicEnergy b = algebraic_energy(*sys_, s);
  b.dissipated = dissipated_;
  b.source_work = work_;
  b.source_work_abs = work_abs_;
  times_.push_back(s.t);
  records_.push_back(b);
}

void EnergyMonitor::write_csv(std::ostream& os) const {
  os << "t,kinetic,elastic,poro,acoustic,total,dissipated,total_plus_dissipated,source_work\n";
  const auto old = os.precision(12);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    os << times_[i] << ',' << r.kinetic << ',' << r.elastic << ',' << r.poro << ',' << r.acoustic << ','
       << r.total() << ',' << r.dissipated << ',' << r.total() + r.dissipated << ',' << r.source_work << '\n';
  }
  os.precision(old);
}

// ---------------------------------------------------------------------------

namespace {

VectorFn space_values(const ExactVector& ex) {
  return [&ex](const Vec2& x) { return ex.space.value(x); };
}

// Exact value (or rate) of a field as a VectorGradFn at time t.
VectorGradFn at_time(const ExactVector& ex, double t, bool rate) {
  const double c = ex.time(t)[rate ? 1 : 0];
  return [&ex, c](const Vec2& x) { return std::pair<Vec2, Mat2>(c * ex.space.value(x), c * ex.space.grad(x)); };
}

ScalarGradFn at_time(const ExactScalar& ex, double t, bool rate) {
  const double c = ex.time(t)[rate ? 1 : 0];
  return [&ex, c](const Vec2& x) { return std::pair<double, Vec2>(c * ex.space.value(x), c * ex.space.grad(x)); };
}

}  // namespace

ErrorHistory::ErrorHistory(const BlockSystem& sys, const ManufacturedSolution& sol)
    : sys_(&sys), sol_(&sol), eta_over_k_(sys.coeffs.eta_over_k) {}

double ErrorHistory::instant(const State& s) const {
  if (sys_->kind == ProblemKind::elastic) return 0.0;
  const DgSpace& V = *sys_->vector_space;
  const auto& L = sys_->layout;
  const VectorXd Zw = s.Z.segment(L.w_offset, L.n_w);
  const double c = sol_->w.time(s.t)[1];
  const VectorFn W = space_values(sol_->w);
  // (eta/k) |e_w'|^2 on the cached element rules
  const auto& active = V.active_elements();
  std::vector<double> part(active.size(), 0.0);
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int e = active[i];
    const ElementCache& ec = V.cache(e);
    const int nb = V.n_basis(e);
    const VectorXd hx = ec.phi * Zw.segment(V.offset(e), nb);
    const VectorXd hy = ec.phi * Zw.segment(V.offset(e) + nb, nb);
    double acc = 0.0;
    for (int q = 0; q < ec.rule.size(); ++q) {
      const Vec2 err = c * W(ec.rule.points[q]) - Vec2(hx[q], hy[q]);
      acc += ec.rule.weights[q] * err.squaredNorm();
    }
    part[i] = eta_over_k_[e] * acc;
  });
  double total = 0.0;
  for (double v : part) total += v;
  // zeta_tau |e_w' . n|^2 on open interface faces
  const PolyMesh& mesh = V.mesh();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.tag != FaceTag::interface_open) continue;
    const int e = face.elements[0];
    if (!V.active(e)) continue;
    const double z = zeta_tau(face.tau);
    if (z == 0.0) continue;
    const Vec2 n = mesh.outward_normal(f, e);
    const auto rule = face_quadrature(mesh, f, 2 * V.degree(e) + 4);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2& x = rule.points[q];
      const Vec2 h(V.field_value(Zw, e, 0, x), V.field_value(Zw, e, 1, x));
      const double en = (c * W(x) - h).dot(n);
      acc += rule.weights[q] * en * en;
    }
    total += z * acc;
  }
  return total;
}

void ErrorHistory::operator()(const State& s) {
  if (sys_->kind == ProblemKind::elastic) return;
  const double v = instant(s);
  if (!started_) {
    const auto& L = sys_->layout;
    initial_ = l2_error_sq(*sys_->vector_space, s.X.segment(L.w_offset, L.n_w), at_time(sol_->w, s.t, false),
                           &eta_over_k_);
    started_ = true;
  } else {
    integral_ += 0.5 * (s.t - last_t_) * (v + last_value_);
  }
  last_t_ = s.t;
  last_value_ = v;
}

ErrorReport compute_errors(const BlockSystem& sys, const ManufacturedSolution& sol, const State& s,
                           const ErrorHistory* history) {
  if (sys.kind != sol.kind) throw std::invalid_argument("compute_errors: system and solution kinds differ");
  if (sys.kind != ProblemKind::elastic && !history)
    throw std::invalid_argument("compute_errors: poro and coupled errors need an ErrorHistory");
  const DgSpace& V = *sys.vector_space;
  const auto& c = sys.coeffs;
  const auto& pen = sys.penalties;
  const auto& L = sys.layout;
  const double t = s.t;
  ErrorReport r;
  r.kind = to_string(sys.kind);
  r.h = V.mesh().max_diameter();
  r.p = V.max_degree();
  r.dofs = sys.size();

  const VectorXd Xu = s.X.segment(L.u_offset, L.n_u), Zu = s.Z.segment(L.u_offset, L.n_u);
  const VectorGradFn u_val = at_time(sol.u, t, false), u_rate = at_time(sol.u, t, true);
  double e2 = dg_norm_elastic_sq(V, c.lambda, c.mu, pen.elastic, Xu, u_val);
  r.err_L2_u = std::sqrt(l2_error_sq(V, Xu, u_val));

  if (sys.kind == ProblemKind::elastic) {
    const ElementField rz2 = product(product(c.rho, c.zeta), c.zeta);
    e2 += l2_error_sq(V, Zu, u_rate, &c.rho) + l2_error_sq(V, Xu, u_val, &rz2);
    r.err_energy = std::sqrt(e2);
    return r;
  }

  const VectorXd Xw = s.X.segment(L.w_offset, L.n_w), Zw = s.Z.segment(L.w_offset, L.n_w);
  // exact fields use the solution's constant material, discrete ones the element fields
  const auto& pm = sol.poro;
  const double phi = pm.phi;
  const ElementField rfp = product(c.rho_f, c.phi);
  e2 += l2_error_sq(V, Zu, u_rate, &c.rho_u);
  // (rho_f phi) |e_u' + e_w'/phi|^2
  const double tu = sol.u.time(t)[1], tw = sol.w.time(t)[1];
  const VectorGradFn mix = [&](const Vec2& x) {
    return std::pair<Vec2, Mat2>(tu * sol.u.space.value(x) + tw / phi * sol.w.space.value(x),
                                 tu * sol.u.space.grad(x) + tw / phi * sol.w.space.grad(x));
  };
  e2 += l2_error_sq(V, Zu + scale_by_element(V, Zw, reciprocal(c.phi)), mix, &rfp);
  // |beta e_u + e_w|_DG,p^2
  const double su = sol.u.time(t)[0], sw = sol.w.time(t)[0];
  const double beta = pm.beta;
  const VectorGradFn q_val = [&](const Vec2& x) {
    return std::pair<Vec2, Mat2>(beta * su * sol.u.space.value(x) + sw * sol.w.space.value(x),
                                 beta * su * sol.u.space.grad(x) + sw * sol.w.space.grad(x));
  };
  e2 += dg_seminorm_poro_sq(V, c.m, pen.poro, scale_by_element(V, Xu, c.beta) + Xw, q_val);
  e2 += history->initial_term() + history->integral();
  r.err_L2_w = std::sqrt(l2_error_sq(V, Xw, at_time(sol.w, t, false)));

  if (sys.kind == ProblemKind::coupled) {
    const DgSpace& Va = *sys.acoustic_space;
    const VectorXd Xp = s.X.segment(L.phi_offset, L.n_phi), Zp = s.Z.segment(L.phi_offset, L.n_phi);
    const ScalarGradFn p_val = at_time(sol.phi, t, false);
    e2 += l2_error_sq(Va, Zp, at_time(sol.phi, t, true), &c.acoustic_mass);
    e2 += dg_norm_acoustic_sq(Va, c.rho_a, pen.acoustic, Xp, p_val);
    e2 += sealed_interface_sq(V, c.m, pen.poro, Xw, at_time(sol.w, t, false));
    r.err_L2_phi = std::sqrt(l2_error_sq(Va, Xp, p_val));
  }
  r.err_energy = std::sqrt(e2);
  return r;
}

// ---------------------------------------------------------------------------

RateReport convergence_rates(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size()) throw std::invalid_argument("convergence_rates: length mismatch");
  if (errors.size() < 2) throw std::invalid_argument("convergence_rates: need at least two samples");
  RateReport r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > 0) || !(errors[i + 1] > 0)) {
      std::cerr << "convergence_rates: zero error at sample " << (errors[i] > 0 ? i + 1 : i)
                << ", rate skipped\n";
      r.pairwise.push_back(nan);
      continue;
    }
    r.pairwise.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0)) continue;
    const double x = std::log(hs[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  r.least_squares = (n >= 2 && den != 0.0) ? (n * sxy - sx * sy) / den : nan;
  return r;
}

double log_linear_correlation(const std::vector<double>& errors, const std::vector<int>& ps) {
  if (errors.size() != ps.size() || errors.size() < 2)
    throw std::invalid_argument("log_linear_correlation: need matching samples (>= 2)");
  const int n = static_cast<int>(errors.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    if (!(errors[i] > 0)) throw std::invalid_argument("log_linear_correlation: errors must be > 0");
    mx += ps[i];
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = ps[i] - mx, dy = std::log(errors[i]) - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

void write_error_csv_header(std::ostream& os) {
  os << "run_id,kind,h,p,dofs,err_energy,err_L2_u,err_L2_w,err_L2_phi,wall_s\n";
}

void write_error_csv_row(std::ostream& os, const ErrorReport& r) {
  const auto old = os.precision(10);
  os << r.run_id << ',' << r.kind << ',' << r.h << ',' << r.p << ',' << r.dofs << ',' << r.err_energy << ','
     << r.err_L2_u << ',' << r.err_L2_w << ',' << r.err_L2_phi << ',' << r.wall_s << '\n';
  os.precision(old);
}

}  // namespace polydg
