#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "polydg/analysis.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/timeint.hpp"

namespace polydg {

/// Mesh of a manufactured-solution domain: either the Voronoi mesh whose
/// max diameter is closest to target_h, or one with a fixed element count.
/// Coupled domains are meshed as a poro block and an acoustic block glued at
/// the interface. Every outer boundary face is Dirichlet.
struct VerificationMeshSpec {
  double target_h = 0.0;  // used when > 0
  int n_elements = 0;     // used otherwise
  int lloyd_iters = 1;
  std::uint64_t seed = 1;
  double tau = 1.0;       // interface permeability (coupled)
};

std::shared_ptr<PolyMesh> verification_mesh(const ManufacturedSolution& sol, const VerificationMeshSpec& spec);

struct ManufacturedRunOptions {
  NewmarkParams scheme;
  double final_time = 1.0;
  PenaltyParams penalties;
  SolveConfig solve;
};

/// Newmark/leap-frog parameters of the reference runs for each kind.
ManufacturedRunOptions default_run_options(ProblemKind kind);

struct ManufacturedRunResult {
  ErrorReport report;
  State final_state;
  std::string solver_method;
};

/// Projects the exact fields at t = 0, integrates to final_time and measures
/// the errors. report.wall_s covers assembly, integration and error evaluation.
ManufacturedRunResult run_manufactured(const ManufacturedSolution& sol, std::shared_ptr<const PolyMesh> mesh, int p,
                                       const ManufacturedRunOptions& options);

struct ConvergenceSuite {
  std::string run_id = "suite";
  std::string solution = "elastic";  // manufactured solution name
  enum class Mode { h, p } mode = Mode::h;
  std::vector<double> hs;            // h mode: target mesh sizes
  std::vector<int> degrees;          // degrees in either mode
  int fixed_elements = 100;          // p mode
  int lloyd_iters = 1;
  std::uint64_t seed = 1;
  double tau = 1.0;
  ManufacturedRunOptions options;
  bool record_wall_time = true;      // false writes 0 so reruns give identical CSVs
};

/// Rates per degree over the h sweep (h mode only).
struct SuiteRates {
  int p = 0;
  RateReport rates;
};

struct SuiteResult {
  std::vector<ErrorReport> rows;
  std::vector<SuiteRates> rates;
};

/// Runs every (mesh, degree) case in a deterministic order; `progress`
/// (may be null) receives one line per finished case.
SuiteResult run_convergence_suite(const ConvergenceSuite& suite, std::ostream* progress = nullptr);

void write_suite_csv(std::ostream& os, const SuiteResult& result);
/// "p,pairwise_rates...,least_squares" lines for the h mode.
void write_rates_csv(std::ostream& os, const SuiteResult& result);

}  // namespace polydg
