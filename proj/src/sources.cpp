#include "polydg/sources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace polydg {

Wavelet Wavelet::ricker_from_beta(double amplitude, double beta_p, double t0) {
  if (!(beta_p > 0)) throw std::invalid_argument("ricker: beta_p must be > 0");
  Wavelet w;
  w.amplitude = amplitude;
  w.peak_frequency = std::sqrt(beta_p) / std::numbers::pi;
  w.t0 = t0;
  return w;
}

Wavelet Wavelet::from_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open wavelet samples " + path);
  Wavelet w;
  w.kind = Kind::samples;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double t, v;
    if (!(ls >> t)) continue;
    if (!(ls >> v)) throw std::runtime_error("wavelet samples: missing value in " + path);
    w.times.push_back(t);
    w.values.push_back(v);
  }
  w.validate();
  return w;
}

double Wavelet::beta_p() const { return std::numbers::pi * std::numbers::pi * peak_frequency * peak_frequency; }

void Wavelet::validate() const {
  if (kind == Kind::ricker) {
    if (!(peak_frequency > 0)) throw std::invalid_argument("ricker: peak frequency must be > 0");
    return;
  }
  if (times.size() < 2 || times.size() != values.size())
    throw std::invalid_argument("wavelet samples: need at least two (time, value) pairs");
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end())
    throw std::invalid_argument("wavelet samples: times must be strictly increasing");
}

double Wavelet::operator()(double t) const {
  if (kind == Kind::ricker) return ricker(t, *this);
  if (t < times.front() || t > times.back()) return 0.0;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return values.back();
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double s = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return (1.0 - s) * values[i - 1] + s * values[i];
}

double ricker(double t, const Wavelet& w) {
  const double a = w.beta_p() * (t - w.t0) * (t - w.t0);
  return w.amplitude * (1.0 - 2.0 * a) * std::exp(-a);
}

int locate_host(const DgSpace& space, const Vec2& x, bool warn) {
  const PolyMesh& mesh = space.mesh();
  const Box bb = mesh.bounding_box();
  const double tol = 1e-10 * std::hypot(bb.width(), bb.height());
  std::vector<int> hits;
  for (int e : mesh.locate(x, tol))
    if (space.active(e)) hits.push_back(e);
  if (hits.empty())
    throw std::invalid_argument("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                                ") is not inside any active element");
  if (hits.size() > 1 && warn)
    std::cerr << "warning: point (" << x.x() << ", " << x.y() << ") lies on the boundary of " << hits.size()
              << " elements; using element " << hits.front() << "\n";
  return hits.front();
}

VectorXd point_force_load(const DgSpace& space, const Vec2& x0, const Vec2& direction) {
  if (space.components() != 2) throw std::invalid_argument("point_force_load: needs a vector space");
  VectorXd b = VectorXd::Zero(space.n_dofs());
  const int e = locate_host(space, x0);
  VectorXd v;
  space.eval(e, x0, v);
  const int nb = space.n_basis(e);
  b.segment(space.dof(e, 0, 0), nb) = direction.x() * v;
  b.segment(space.dof(e, 1, 0), nb) = direction.y() * v;
  return b;
}

VectorXd double_couple_load(const DgSpace& space, const Vec2& x0, const Mat2& m) {
  if (space.components() != 2) throw std::invalid_argument("double_couple_load: needs a vector space");
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("double_couple_load: moment tensor must be symmetric");
  VectorXd b = VectorXd::Zero(space.n_dofs());
  const int e = locate_host(space, x0);
  VectorXd v, dx, dy;
  space.eval(e, x0, v, dx, dy);
  const int nb = space.n_basis(e);
  // basis phi e_i: grad = e_i (x) grad phi, so m : grad = m_i0 d_x phi + m_i1 d_y phi
  for (int i = 0; i < 2; ++i) b.segment(space.dof(e, i, 0), nb) = m(i, 0) * dx + m(i, 1) * dy;
  return b;
}

Mat2 moment_tensor(double m0_over_volume, const Vec2& n, const Vec2& s) {
  return m0_over_volume * (s * n.transpose() + n * s.transpose());
}

namespace {

template <class F>
double simpson(const F& f, double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double plane_wave_amplitude(double t, double z, double z0, double c, double rho, const Wavelet& f) {
  if (!(c > 0)) throw std::invalid_argument("plane_wave_amplitude: c must be > 0");
  const double s = t - std::abs(z - z0) / c;
  if (s <= 0.0) return 0.0;
  // Split at 64 panels so narrow pulses are not missed by the first Simpson estimate.
  constexpr int kPanels = 64;
  double integral = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double a = s * k / kPanels, b = s * (k + 1) / kPanels;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    integral += adaptive_simpson(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), 1e-13, 40);
  }
  return integral / (2.0 * rho * c);
}

VectorXd disk_indicator_load(const DgSpace& space, const std::vector<Vec2>& centers, double radius) {
  if (space.components() != 1) throw std::invalid_argument("disk_indicator_load: needs a scalar space");
  if (!(radius > 0)) throw std::invalid_argument("disk_indicator_load: radius must be > 0");
  constexpr int kRadial = 24, kAngular = 96;
  const auto& g = gauss_legendre(kRadial);
  VectorXd b = VectorXd::Zero(space.n_dofs());
  VectorXd v;
  for (const Vec2& c : centers) {
    const double dtheta = 2.0 * std::numbers::pi / kAngular;
    for (int i = 0; i < kRadial; ++i) {
      const double r = 0.5 * radius * (g.nodes[i] + 1.0);
      const double wr = 0.5 * radius * g.weights[i] * r;
      for (int j = 0; j < kAngular; ++j) {
        const double th = (j + 0.5) * dtheta;
        const Vec2 x = c + r * Vec2(std::cos(th), std::sin(th));
        const int e = locate_host(space, x, false);
        space.eval(e, x, v);
        b.segment(space.offset(e), space.n_basis(e)) += (wr * dtheta) * v;
      }
    }
  }
  return b;
}

}  // namespace polydg
