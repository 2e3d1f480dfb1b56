#pragma once

#include <string>
#include <vector>

#include "polydg/forms.hpp"

namespace polydg {

/// Source time function: a Ricker pulse or linearly interpolated samples.
struct Wavelet {
  enum class Kind { ricker, samples };
  Kind kind = Kind::ricker;
  double amplitude = 1.0;
  double peak_frequency = 1.0;  // f_p [Hz]
  double t0 = 0.0;
  std::vector<double> times, values;  // samples kind; zero outside the sampled range

  /// Ricker pulse from beta_p = pi^2 f_p^2 instead of f_p.
  static Wavelet ricker_from_beta(double amplitude, double beta_p, double t0);
  /// Two-column text: time value per line, '#' comments allowed.
  static Wavelet from_samples_file(const std::string& path);

  double beta_p() const;
  double operator()(double t) const;
  void validate() const;
};

/// A0 (1 - 2 beta_p (t - t0)^2) exp(-beta_p (t - t0)^2), beta_p = pi^2 f_p^2.
double ricker(double t, const Wavelet& w);

/// Host element of a point; on shared faces or vertices the lowest element id
/// wins and a warning goes to stderr. Throws if no active element contains x.
int locate_host(const DgSpace& space, const Vec2& x, bool warn = true);

/// Spatial part of f(t) e_dir delta(x - x0): entry = e_dir . basis_j(x0).
VectorXd point_force_load(const DgSpace& space, const Vec2& x0, const Vec2& direction);

/// Spatial part of a point moment tensor, paired as m : grad v(x0).
VectorXd double_couple_load(const DgSpace& space, const Vec2& x0, const Mat2& moment);

/// Moment tensor (M0 / V)(s n^T + n s^T) of a fault with normal n and slip s.
Mat2 moment_tensor(double m0_over_volume, const Vec2& fault_normal, const Vec2& slip);

/// Plane-wave displacement amplitude
///   (2 rho c)^{-1} H(t - |z - z0|/c) int_0^{t - |z - z0|/c} f(s) ds
/// with the integral taken by adaptive Simpson quadrature.
double plane_wave_amplitude(double t, double z, double z0, double c, double rho, const Wavelet& f);

/// Moments of the indicator of a union of disks against a scalar space.
/// Polar Gauss quadrature on each disk, split by element.
VectorXd disk_indicator_load(const DgSpace& space, const std::vector<Vec2>& centers, double radius);

}  // namespace polydg
