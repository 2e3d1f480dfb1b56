#include "polydg/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polydg {

namespace {
constexpr double kPi = std::numbers::pi;
}

Fn1 Fn1::constant(double c) {
  return {[c](double) { return std::array<double, 3>{c, 0.0, 0.0}; }};
}

Fn1 Fn1::monomial(int k) {
  if (k < 0) throw std::invalid_argument("Fn1::monomial: negative power");
  return {[k](double s) {
    const double a = std::pow(s, k);
    const double b = k >= 1 ? k * std::pow(s, k - 1) : 0.0;
    const double c = k >= 2 ? k * (k - 1) * std::pow(s, k - 2) : 0.0;
    return std::array<double, 3>{a, b, c};
  }};
}

Fn1 Fn1::sine(double k) {
  return {[k](double s) {
    const double sn = std::sin(k * s), cs = std::cos(k * s);
    return std::array<double, 3>{sn, k * cs, -k * k * sn};
  }};
}

Fn1 Fn1::cosine(double k) {
  return {[k](double s) {
    const double sn = std::sin(k * s), cs = std::cos(k * s);
    return std::array<double, 3>{cs, -k * sn, -k * k * cs};
  }};
}

Fn1 operator*(const Fn1& a, const Fn1& b) {
  return {[a, b](double s) {
    const auto f = a(s), g = b(s);
    return std::array<double, 3>{f[0] * g[0], f[1] * g[0] + f[0] * g[1], f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2]};
  }};
}

double ScalarField::value(const Vec2& p) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.coeff * t.x(p.x())[0] * t.y(p.y())[0];
  return v;
}

Vec2 ScalarField::grad(const Vec2& p) const {
  Vec2 g = Vec2::Zero();
  for (const auto& t : terms) {
    const auto X = t.x(p.x()), Y = t.y(p.y());
    g += t.coeff * Vec2(X[1] * Y[0], X[0] * Y[1]);
  }
  return g;
}

Mat2 ScalarField::hessian(const Vec2& p) const {
  Mat2 H = Mat2::Zero();
  for (const auto& t : terms) {
    const auto X = t.x(p.x()), Y = t.y(p.y());
    Mat2 h;
    h << X[2] * Y[0], X[1] * Y[1], X[1] * Y[1], X[0] * Y[2];
    H += t.coeff * h;
  }
  return H;
}

ScalarField ScalarField::scaled(double s) const {
  ScalarField r = *this;
  for (auto& t : r.terms) t.coeff *= s;
  return r;
}

Mat2 VectorField::grad(const Vec2& p) const {
  Mat2 G;
  G.row(0) = x.grad(p).transpose();
  G.row(1) = y.grad(p).transpose();
  return G;
}

Vec2 VectorField::grad_div(const Vec2& p) const {
  const Mat2 hx = x.hessian(p), hy = y.hessian(p);
  return {hx(0, 0) + hy(0, 1), hx(1, 0) + hy(1, 1)};
}

Vec2 VectorField::laplacian(const Vec2& p) const { return {x.hessian(p).trace(), y.hessian(p).trace()}; }

TimeFn sin_time(double w) {
  return [w](double t) {
    return std::array<double, 3>{std::sin(w * t), w * std::cos(w * t), -w * w * std::sin(w * t)};
  };
}

TimeFn cos_time(double w) {
  return [w](double t) {
    return std::array<double, 3>{std::cos(w * t), -w * std::sin(w * t), -w * w * std::cos(w * t)};
  };
}

MaterialTable ManufacturedSolution::materials() const {
  MaterialTable m;
  m.set(0, elastic);
  m.set(0, poro);
  m.set(0, acoustic);
  return m;
}

namespace {

ScalarField zero_field() { return {}; }

VectorField poro_displacement() {
  const Fn1 F = Fn1::monomial(2) * Fn1::cosine(kPi / 2.0) * Fn1::sine(kPi);
  const ScalarField c{{{1.0, F, Fn1::constant(1.0)}}};
  return {c, c};
}

PoroMaterial verification_poro_material() {
  PoroMaterial p;
  p.rho_f = 1.0;
  p.rho_s = 1.0;  // gives rho = phi rho_f + (1 - phi) rho_s = 1
  p.phi = 0.5;
  p.a = 1.0;
  p.eta = 1.0;
  p.k = 1.0;
  p.m = 1.0;
  p.beta = 1.0;
  p.lambda = 1.0;
  p.mu = 1.0;
  return p;
}

}  // namespace

ManufacturedSolution elastic_manufactured() {
  ManufacturedSolution s;
  s.name = "elastic";
  s.kind = ProblemKind::elastic;
  s.domain = Box{{0.0, 0.0}, {1.0, 1.0}};
  const Fn1 sin2 = Fn1::sine(kPi) * Fn1::sine(kPi);
  s.u.space.x = ScalarField{{{-1.0, sin2, Fn1::sine(2.0 * kPi)}}};
  s.u.space.y = ScalarField{{{1.0, Fn1::sine(2.0 * kPi), sin2}}};
  s.u.time = sin_time(std::sqrt(2.0) * kPi);
  s.w = {{zero_field(), zero_field()}, sin_time(0.0)};
  s.phi = {zero_field(), sin_time(0.0)};
  s.elastic = ElasticMaterial{1.0, 1.0, 1.0, 1.0};
  return s;
}

ManufacturedSolution poro_manufactured() {
  ManufacturedSolution s;
  s.name = "poro";
  s.kind = ProblemKind::poro;
  s.domain = Box{{-1.0, 0.0}, {0.0, 1.0}};
  s.poro_domain = s.domain;
  const VectorField U = poro_displacement();
  s.u = {U, cos_time(std::sqrt(2.0) * kPi)};
  s.w = {U.scaled(-1.0), cos_time(std::sqrt(2.0) * kPi)};
  s.phi = {zero_field(), sin_time(0.0)};
  s.poro = verification_poro_material();
  return s;
}

ManufacturedSolution coupled_manufactured() {
  ManufacturedSolution s = poro_manufactured();
  s.name = "coupled";
  s.kind = ProblemKind::coupled;
  s.domain = Box{{-1.0, 0.0}, {1.0, 1.0}};
  s.acoustic_domain = Box{{0.0, 0.0}, {1.0, 1.0}};
  s.phi.space = ScalarField{{{1.0, Fn1::monomial(2) * Fn1::sine(kPi), Fn1::sine(kPi)}}};
  s.phi.time = sin_time(std::sqrt(2.0) * kPi);
  s.acoustic = AcousticMaterial{1.0, 1.0};
  return s;
}

ManufacturedSolution manufactured_by_name(const std::string& name) {
  if (name == "elastic") return elastic_manufactured();
  if (name == "poro") return poro_manufactured();
  if (name == "coupled") return coupled_manufactured();
  throw std::invalid_argument("unknown manufactured solution '" + name + "'");
}

Vec2 ManufacturedForcing::f_at(const Vec2& x, double t) const {
  Vec2 s = Vec2::Zero();
  for (const auto& term : f) s += term.factor(t) * term.field(x);
  return s;
}

Vec2 ManufacturedForcing::g_at(const Vec2& x, double t) const {
  Vec2 s = Vec2::Zero();
  for (const auto& term : g) s += term.factor(t) * term.field(x);
  return s;
}

double ManufacturedForcing::h_at(const Vec2& x, double t) const {
  double s = 0.0;
  for (const auto& term : h) s += term.factor(t) * term.field(x);
  return s;
}

namespace {

std::function<double(double)> derivative(const TimeFn& T, int k, double c = 1.0) {
  return [T, k, c](double t) { return c * T(t)[k]; };
}

}  // namespace

ManufacturedForcing manufactured_forcing(const ManufacturedSolution& sol) {
  ManufacturedForcing F;
  const VectorField U = sol.u.space;
  const TimeFn Tu = sol.u.time;
  if (sol.kind == ProblemKind::elastic) {
    const auto m = sol.elastic;
    // rho (T'' + 2 zeta T' + zeta^2 T) U - T (mu lap U + (lambda + mu) grad div U)
    F.f.push_back({[Tu, m](double t) {
                     const auto T = Tu(t);
                     return m.rho * (T[2] + 2.0 * m.zeta * T[1] + m.zeta * m.zeta * T[0]);
                   },
                   [U](const Vec2& x) { return U.value(x); }});
    F.f.push_back({derivative(Tu, 0),
                   [U, m](const Vec2& x) { return Vec2(-(m.mu * U.laplacian(x) + (m.lambda + m.mu) * U.grad_div(x))); }});
    return F;
  }

  const auto p = sol.poro;
  const auto d = p.derived();
  const VectorField W = sol.w.space;
  const TimeFn Tw = sol.w.time;
  // Solid: rho u'' + rho_f w'' - div sigma(u) - beta m grad div(beta u + w)
  F.f.push_back({derivative(Tu, 2, d.rho), [U](const Vec2& x) { return U.value(x); }});
  F.f.push_back({derivative(Tw, 2, p.rho_f), [W](const Vec2& x) { return W.value(x); }});
  F.f.push_back({derivative(Tu, 0), [U, p](const Vec2& x) {
                   return Vec2(-(p.mu * U.laplacian(x) + (p.lambda + p.mu) * U.grad_div(x)) -
                               p.beta * p.beta * p.m * U.grad_div(x));
                 }});
  F.f.push_back({derivative(Tw, 0), [W, p](const Vec2& x) { return Vec2(-p.beta * p.m * W.grad_div(x)); }});
  // Filtration: rho_f u'' + rho_w w'' + eta/k w' - m grad div(beta u + w)
  F.g.push_back({derivative(Tu, 2, p.rho_f), [U](const Vec2& x) { return U.value(x); }});
  F.g.push_back({derivative(Tw, 2, d.rho_w), [W](const Vec2& x) { return W.value(x); }});
  F.g.push_back({derivative(Tw, 1, p.eta_over_k()), [W](const Vec2& x) { return W.value(x); }});
  F.g.push_back({derivative(Tu, 0), [U, p](const Vec2& x) { return Vec2(-p.beta * p.m * U.grad_div(x)); }});
  F.g.push_back({derivative(Tw, 0), [W, p](const Vec2& x) { return Vec2(-p.m * W.grad_div(x)); }});

  if (sol.kind == ProblemKind::coupled) {
    const auto a = sol.acoustic;
    const ScalarField P = sol.phi.space;
    const TimeFn Tp = sol.phi.time;
    // rho_a c^-2 phi'' - rho_a lap phi
    F.h.push_back({derivative(Tp, 2, a.rho_a / (a.c * a.c)), [P](const Vec2& x) { return P.value(x); }});
    F.h.push_back({derivative(Tp, 0, -a.rho_a), [P](const Vec2& x) { return P.hessian(x).trace(); }});
  }
  return F;
}

LoadFunction manufactured_load(const BlockSystem& sys, const ManufacturedSolution& sol, const PenaltyParams& pen) {
  if (sys.kind != sol.kind) throw std::invalid_argument("manufactured_load: problem kind mismatch");
  const DgSpace& V = *sys.vector_space;
  const auto c = coefficient_fields(V.mesh(), sol.materials());
  const ManufacturedForcing F = manufactured_forcing(sol);
  const BlockLayout& L = sys.layout;
  LoadFunction load(sys.size());
  const auto place = [&](int offset, const VectorXd& v) {
    VectorXd full = VectorXd::Zero(sys.size());
    full.segment(offset, v.size()) = v;
    return full;
  };
  for (const auto& term : F.f) load.add(term.factor, place(L.u_offset, assemble_load(V, term.field)));
  for (const auto& term : F.g) load.add(term.factor, place(L.w_offset, assemble_load(V, term.field)));

  const VectorField U = sol.u.space, W = sol.w.space;
  load.add(derivative(sol.u.time, 0),
           place(L.u_offset, elastic_dirichlet_load(V, c.lambda, c.mu, pen.elastic,
                                                    [U](const Vec2& x) { return U.value(x); })));
  if (sys.kind != ProblemKind::elastic) {
    // Normal data of the combined field beta u + w tested with beta v + z.
    const double beta = sol.poro.beta;
    const VectorXd Lu = divdiv_dirichlet_load(V, c.m, pen.poro, [U, beta](const Vec2& x) { return Vec2(beta * U.value(x)); });
    const VectorXd Lw = divdiv_dirichlet_load(V, c.m, pen.poro, [W](const Vec2& x) { return W.value(x); });
    VectorXd vu = VectorXd::Zero(sys.size()), vw = VectorXd::Zero(sys.size());
    vu.segment(L.u_offset, L.n_u) = beta * Lu;
    vu.segment(L.w_offset, L.n_w) = Lu;
    vw.segment(L.u_offset, L.n_u) = beta * Lw;
    vw.segment(L.w_offset, L.n_w) = Lw;
    load.add(derivative(sol.u.time, 0), std::move(vu));
    load.add(derivative(sol.w.time, 0), std::move(vw));
  }
  if (sys.kind == ProblemKind::coupled) {
    const DgSpace& Va = *sys.acoustic_space;
    for (const auto& term : F.h) load.add(term.factor, place(L.phi_offset, assemble_load(Va, term.field)));
    const ScalarField P = sol.phi.space;
    const VectorXd Lp = acoustic_dirichlet_load(Va, c.rho_a, pen.acoustic, [P](const Vec2& x) { return P.value(x); });
    if (Lp.norm() > 0) load.add(derivative(sol.phi.time, 0), place(L.phi_offset, Lp));
  }
  return load;
}

void project_exact_state(const BlockSystem& sys, const ManufacturedSolution& sol, double t, VectorXd& X,
                         VectorXd& Z) {
  X = VectorXd::Zero(sys.size());
  Z = VectorXd::Zero(sys.size());
  const DgSpace& V = *sys.vector_space;
  const BlockLayout& L = sys.layout;
  X.segment(L.u_offset, L.n_u) = l2_project(V, VectorFn([&](const Vec2& x) { return sol.u.value(x, t); }));
  Z.segment(L.u_offset, L.n_u) = l2_project(V, VectorFn([&](const Vec2& x) { return sol.u.rate(x, t); }));
  if (L.n_w > 0) {
    X.segment(L.w_offset, L.n_w) = l2_project(V, VectorFn([&](const Vec2& x) { return sol.w.value(x, t); }));
    Z.segment(L.w_offset, L.n_w) = l2_project(V, VectorFn([&](const Vec2& x) { return sol.w.rate(x, t); }));
  }
  if (L.n_phi > 0) {
    const DgSpace& Va = *sys.acoustic_space;
    X.segment(L.phi_offset, L.n_phi) = l2_project(Va, ScalarFn([&](const Vec2& x) { return sol.phi.value(x, t); }));
    Z.segment(L.phi_offset, L.n_phi) = l2_project(Va, ScalarFn([&](const Vec2& x) { return sol.phi.rate(x, t); }));
  }
}

}  // namespace polydg
