#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "polydg/forms.hpp"
#include "polydg/materials.hpp"

namespace polydg {

/// Smooth function of one variable with its first two derivatives.
struct Fn1 {
  std::function<std::array<double, 3>(double)> eval;

  std::array<double, 3> operator()(double s) const { return eval(s); }
  static Fn1 constant(double c);
  static Fn1 monomial(int k);          // s^k
  static Fn1 sine(double k);           // sin(k s)
  static Fn1 cosine(double k);         // cos(k s)
  friend Fn1 operator*(const Fn1& a, const Fn1& b);
};

/// Sum of separable terms c * X(x) * Y(y).
struct ScalarField {
  struct Term {
    double coeff;
    Fn1 x, y;
  };
  std::vector<Term> terms;

  double value(const Vec2& p) const;
  Vec2 grad(const Vec2& p) const;
  Mat2 hessian(const Vec2& p) const;
  ScalarField scaled(double s) const;
};

struct VectorField {
  ScalarField x, y;

  Vec2 value(const Vec2& p) const { return {x.value(p), y.value(p)}; }
  /// Row i is the gradient of component i.
  Mat2 grad(const Vec2& p) const;
  double div(const Vec2& p) const { return grad(p).trace(); }
  /// grad (div v)
  Vec2 grad_div(const Vec2& p) const;
  Vec2 laplacian(const Vec2& p) const;
  VectorField scaled(double s) const { return {x.scaled(s), y.scaled(s)}; }
};

/// Time profile with two derivatives.
using TimeFn = std::function<std::array<double, 3>(double)>;

TimeFn sin_time(double omega);
TimeFn cos_time(double omega);

struct ExactVector {
  VectorField space;
  TimeFn time;

  Vec2 value(const Vec2& x, double t) const { return time(t)[0] * space.value(x); }
  Vec2 rate(const Vec2& x, double t) const { return time(t)[1] * space.value(x); }
  Mat2 grad(const Vec2& x, double t) const { return time(t)[0] * space.grad(x); }
  Mat2 rate_grad(const Vec2& x, double t) const { return time(t)[1] * space.grad(x); }
};

struct ExactScalar {
  ScalarField space;
  TimeFn time;

  double value(const Vec2& x, double t) const { return time(t)[0] * space.value(x); }
  double rate(const Vec2& x, double t) const { return time(t)[1] * space.value(x); }
  Vec2 grad(const Vec2& x, double t) const { return time(t)[0] * space.grad(x); }
  Vec2 rate_grad(const Vec2& x, double t) const { return time(t)[1] * space.grad(x); }
};

/// Exact fields plus the constant materials they were built for.
struct ManufacturedSolution {
  std::string name;
  ProblemKind kind = ProblemKind::elastic;
  Box domain;        // whole domain
  Box poro_domain;   // poro part (poro/coupled)
  Box acoustic_domain;
  ExactVector u, w;
  ExactScalar phi;
  ElasticMaterial elastic;
  PoroMaterial poro;
  AcousticMaterial acoustic;

  MaterialTable materials() const;
};

/// u = sin(sqrt2 pi t) [-sin^2(pi x) sin(2 pi y), sin(2 pi x) sin^2(pi y)] on (0,1)^2,
/// lambda = mu = rho = zeta = 1.
ManufacturedSolution elastic_manufactured();
/// u = (F, F) cos(sqrt2 pi t), w = -u, F = x^2 cos(pi x/2) sin(pi x) on (-1,0)x(0,1).
ManufacturedSolution poro_manufactured();
/// The poro fields above plus phi = x^2 sin(pi x) sin(pi y) sin(sqrt2 pi t) on (0,1)^2.
ManufacturedSolution coupled_manufactured();
ManufacturedSolution manufactured_by_name(const std::string& name);

/// Separable forcing term factor(t) * field(x).
struct VectorForcing {
  std::function<double(double)> factor;
  VectorFn field;
};
struct ScalarForcing {
  std::function<double(double)> factor;
  ScalarFn field;
};

/// Strong-form residuals of the exact fields: f (solid), g (filtration), h (acoustic).
struct ManufacturedForcing {
  std::vector<VectorForcing> f, g;
  std::vector<ScalarForcing> h;

  Vec2 f_at(const Vec2& x, double t) const;
  Vec2 g_at(const Vec2& x, double t) const;
  double h_at(const Vec2& x, double t) const;
};

ManufacturedForcing manufactured_forcing(const ManufacturedSolution& sol);

/// Body forcing plus Nitsche Dirichlet data of the exact fields, as a load on `sys`.
LoadFunction manufactured_load(const BlockSystem& sys, const ManufacturedSolution& sol,
                               const PenaltyParams& penalties);

/// L2 projections of (value, rate) of the exact fields at time t into the
/// global unknown vector of `sys`.
void project_exact_state(const BlockSystem& sys, const ManufacturedSolution& sol, double t, VectorXd& X,
                         VectorXd& Z);

}  // namespace polydg
