#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polydg/timeint.hpp"

namespace polydg {

/// Pressure in a poro element, -m (beta div u + div w), or rho_a phi' in an
/// acoustic element. Evaluated at x inside element e.
double pressure_at(const BlockSystem& sys, const State& s, int e, const Vec2& x);

/// Legacy-VTK ASCII unstructured grid. Each element is one VTK_POLYGON whose
/// loop holds the element vertices and edge midpoints (duplicated per element,
/// so the point data are the discontinuous high-order traces). Cell data are
/// element averages; point data are point samples of the same fields.
void write_vtk_snapshot(std::ostream& os, const BlockSystem& sys, const State& s, const std::string& title);

/// Samples fields at fixed points. Each point is bound to its host element
/// once; columns depend on the host subdomain:
///   solid/poro: ux, uy, vx, vy (v = u'), plus wx, wy, pressure for poro;
///   acoustic:   phi, pressure.
class ProbeRecorder {
 public:
  ProbeRecorder(const BlockSystem& sys, std::vector<Vec2> points, int cadence = 1);
  void operator()(const State& s);
  Observer observer() {
    return [this](const State& s) { (*this)(s); };
  }
  void write_csv(std::ostream& os) const;
  int n_rows() const { return static_cast<int>(rows_.size()); }

 private:
  const BlockSystem* sys_;
  std::vector<Vec2> points_;
  std::vector<int> hosts_;
  int cadence_;
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace polydg
