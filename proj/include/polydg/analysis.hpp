#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polydg/forms.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/timeint.hpp"

namespace polydg {

/// Exact field with gradient, used to measure (exact - discrete). Empty means zero.
using VectorGradFn = std::function<std::pair<Vec2, Mat2>(const Vec2&)>;
using ScalarGradFn = std::function<std::pair<double, Vec2>(const Vec2&)>;

// ---------------------------------------------------------------------------
// DG norms of (exact - v); pass an empty exact field for the norm of v itself.

/// ||D^{1/2} eps(e)||^2 + ||eta^{1/2} [e]||^2 over interior and Dirichlet faces.
double dg_norm_elastic_sq(const DgSpace& space, const ElementField& lambda, const ElementField& mu, double sigma0,
                          const VectorXd& v, const VectorGradFn& exact = {});

/// ||m^{1/2} div e||^2 + ||gamma^{1/2} [e]_n||^2 over interior and Dirichlet faces.
double dg_seminorm_poro_sq(const DgSpace& space, const ElementField& m, double m0, const VectorXd& z,
                           const VectorGradFn& exact = {});

/// ||rho_a^{1/2} grad e||^2 + ||chi^{1/2} [e]||^2 over interior and Dirichlet faces.
double dg_norm_acoustic_sq(const DgSpace& space, const ElementField& rho_a, double rho0, const VectorXd& phi,
                           const ScalarGradFn& exact = {});

/// int_F gamma (e . n)^2 over sealed interface faces.
double sealed_interface_sq(const DgSpace& space, const ElementField& m, double m0, const VectorXd& z,
                           const VectorGradFn& exact = {});

/// Weighted L2 norms squared: int coeff |exact - v|^2.
double l2_error_sq(const DgSpace& space, const VectorXd& v, const VectorGradFn& exact = {},
                   const ElementField* coeff = nullptr);
double l2_error_sq(const DgSpace& space, const VectorXd& v, const ScalarGradFn& exact,
                   const ElementField* coeff = nullptr);

// ---------------------------------------------------------------------------
// Energies of discrete states

/// 1/2 (Z^T M Z + X^T A X) split by physics, plus the work dissipated by D.
/// This is the quantity Newmark(1/4, 1/2) balances exactly.
struct AlgebraicEnergy {
  double kinetic = 0.0;     // 1/2 Z^T M Z
  double elastic = 0.0;     // 1/2 u^T A u-block (incl. rho zeta^2 mass for the elastic kind)
  double poro = 0.0;        // 1/2 q^T A^p q, q = beta u + w
  double acoustic = 0.0;    // 1/2 phi^T A^a phi
  double dissipated = 0.0;  // int Z^T D Z dt, accumulated by a monitor
  double source_work = 0.0; // int Z^T S dt, accumulated by a monitor
  double source_work_abs = 0.0;  // int |Z^T S| dt
  double total() const { return kinetic + elastic + poro + acoustic; }
};

AlgebraicEnergy algebraic_energy(const BlockSystem& sys, const State& s);

/// Time integrals entering the energy norm: int (eta/k)|w'|^2 and
/// int zeta_tau |w'.n|^2 over open interface faces, by the trapezoidal rule,
/// plus the constant (eta/k)|w(0)|^2.
struct EnergyAccumulators {
  double initial_filtration = 0.0;
  double filtration_integral = 0.0;
  double interface_integral = 0.0;

  void advance(const BlockSystem& sys, const State& s);

 private:
  bool started_ = false;
  double last_t_ = 0.0, last_filtration_ = 0.0, last_interface_ = 0.0;
};

/// Squared terms of the energy norm of a discrete state.
struct EnergyBreakdown {
  double kinetic = 0.0;         // rho|u'|^2, or rho_u|u'|^2 + rho_f phi|u' + w'/phi|^2 (+ rho_a c^-2 |phi'|^2)
  double damping_mass = 0.0;    // rho zeta^2 |u|^2 (elastic)
  double dg_elastic = 0.0;
  double dg_poro = 0.0;         // |beta u + w|_DG,p^2
  double dg_acoustic = 0.0;
  double sealed = 0.0;          // gamma |w.n|^2 on sealed faces
  double initial_filtration = 0.0;
  double filtration_integral = 0.0;
  double interface_integral = 0.0;

  double total() const {
    return kinetic + damping_mass + dg_elastic + dg_poro + dg_acoustic + sealed + initial_filtration +
           filtration_integral + interface_integral;
  }
};

EnergyBreakdown energy_breakdown(const BlockSystem& sys, const State& s, const EnergyAccumulators& acc = {});

/// Observer recording the algebraic energy (every `cadence` steps) and
/// advancing the energy-norm accumulators every step. Dissipated and source
/// work use the step-averaged velocity and load, matching the Newmark(1/4, 1/2)
/// balance total + dissipated = initial total + source work.
class EnergyMonitor {
 public:
  explicit EnergyMonitor(const BlockSystem& sys, int cadence = 1) : sys_(&sys), cadence_(cadence) {}
  void operator()(const State& s);
  Observer observer() {
    return [this](const State& s) { (*this)(s); };
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<AlgebraicEnergy>& records() const { return records_; }
  const EnergyAccumulators& accumulators() const { return acc_; }
  void write_csv(std::ostream& os) const;

 private:
  const BlockSystem* sys_;
  int cadence_;
  std::optional<State> last_;
  double dissipated_ = 0.0, work_ = 0.0, work_abs_ = 0.0;
  VectorXd last_load_;
  EnergyAccumulators acc_;
  std::vector<double> times_;
  std::vector<AlgebraicEnergy> records_;
};

// ---------------------------------------------------------------------------
// Errors against manufactured solutions

struct ErrorReport {
  std::string run_id;
  std::string kind;
  double h = 0.0;
  int p = 0;
  int dofs = 0;
  double err_energy = 0.0;
  double err_L2_u = 0.0;
  double err_L2_w = 0.0;
  double err_L2_phi = 0.0;
  double wall_s = 0.0;
};

/// Accumulates the time integrals of the energy error (eta/k |e_w'|^2 and
/// zeta_tau |e_w' . n|^2 on open faces) by the trapezoidal rule, and keeps
/// the initial (eta/k) |e_w(0)|^2 term.
class ErrorHistory {
 public:
  ErrorHistory(const BlockSystem& sys, const ManufacturedSolution& sol);
  void operator()(const State& s);
  Observer observer() {
    return [this](const State& s) { (*this)(s); };
  }
  double integral() const { return integral_; }
  double initial_term() const { return initial_; }

 private:
  double instant(const State& s) const;
  const BlockSystem* sys_;
  const ManufacturedSolution* sol_;
  ElementField eta_over_k_;
  double integral_ = 0.0, initial_ = 0.0;
  double last_t_ = 0.0, last_value_ = 0.0;
  bool started_ = false;
};

/// Energy-norm and L2 errors of the state at time s.t. Poro and coupled
/// errors need the history of the run.
ErrorReport compute_errors(const BlockSystem& sys, const ManufacturedSolution& sol, const State& s,
                           const ErrorHistory* history = nullptr);

// ---------------------------------------------------------------------------
// Rates

struct RateReport {
  std::vector<double> pairwise;  // log(e_i/e_{i+1}) / log(h_i/h_{i+1}); NaN when skipped
  double least_squares = 0.0;    // slope of log e against log h
};

/// Needs at least two samples. Pairs with a zero error are skipped with a
/// notice on stderr and left out of the fit.
RateReport convergence_rates(const std::vector<double>& errors, const std::vector<double>& hs);

/// Pearson correlation of log(error) against p.
double log_linear_correlation(const std::vector<double>& errors, const std::vector<int>& ps);

void write_error_csv_header(std::ostream& os);
void write_error_csv_row(std::ostream& os, const ErrorReport& r);

}  // namespace polydg
