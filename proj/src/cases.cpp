#include "polydg/cases.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace polydg {

namespace {

double area(const Box& b) { return (b.hi.x() - b.lo.x()) * (b.hi.y() - b.lo.y()); }

}  // namespace

std::shared_ptr<PolyMesh> verification_mesh(const ManufacturedSolution& sol, const VerificationMeshSpec& spec) {
  if (!(spec.target_h > 0.0) && spec.n_elements < 1)
    throw std::invalid_argument("verification_mesh: give a target h or an element count");
  PolyMesh m;
  if (sol.kind == ProblemKind::coupled) {
    std::vector<MeshBlock> blocks{{sol.poro_domain, 1, Subdomain::poroelastic, 0},
                                  {sol.acoustic_domain, 1, Subdomain::acoustic, 0}};
    if (spec.target_h > 0.0) {
      m = block_voronoi_mesh_for_h(blocks, spec.target_h, spec.lloyd_iters, spec.seed);
    } else {
      const double total = area(sol.poro_domain) + area(sol.acoustic_domain);
      blocks[0].n_elements = std::max(1, static_cast<int>(std::lround(spec.n_elements * area(sol.poro_domain) / total)));
      blocks[1].n_elements = std::max(1, spec.n_elements - blocks[0].n_elements);
      m = generate_block_voronoi_mesh(blocks, spec.lloyd_iters, spec.seed);
    }
    const double tau = spec.tau;
    m = classify_boundary(m, uniform_tagger(FaceTag::dirichlet), [tau](const Vec2&) { return tau; });
  } else {
    m = spec.target_h > 0.0 ? voronoi_mesh_for_h(sol.domain, spec.target_h, spec.lloyd_iters, spec.seed)
                            : generate_voronoi_mesh(sol.domain, spec.n_elements, spec.lloyd_iters, spec.seed);
    if (sol.kind == ProblemKind::poro) m.set_labels(std::vector<Subdomain>(m.n_elements(), Subdomain::poroelastic));
    m = classify_boundary(m, uniform_tagger(FaceTag::dirichlet));
  }
  return std::make_shared<PolyMesh>(std::move(m));
}

ManufacturedRunOptions default_run_options(ProblemKind kind) {
  ManufacturedRunOptions o;
  if (kind == ProblemKind::elastic) {
    o.scheme = NewmarkParams::leapfrog(1e-4);
    o.final_time = 1.0;
  } else {
    o.scheme = {0.25, 0.5, 1e-4};
    o.final_time = 0.25;
  }
  return o;
}

ManufacturedRunResult run_manufactured(const ManufacturedSolution& sol, std::shared_ptr<const PolyMesh> mesh, int p,
                                       const ManufacturedRunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  BlockSystem sys = build_block_system(sol.kind, mesh, p, sol.materials(), options.penalties);
  sys.load = manufactured_load(sys, sol, options.penalties);
  VectorXd X, Z;
  project_exact_state(sys, sol, 0.0, X, Z);
  NewmarkIntegrator integ(SecondOrderSystem::from(sys), options.scheme, options.solve);
  ErrorHistory history(sys, sol);
  ManufacturedRunResult out;
  out.final_state = integrate(integ, integ.initial_state(X, Z, 0.0), options.final_time, {history.observer()});
  out.report = compute_errors(sys, sol, out.final_state, &history);
  out.solver_method = integ.solver_method();
  out.report.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SuiteResult run_convergence_suite(const ConvergenceSuite& suite, std::ostream* progress) {
  const ManufacturedSolution sol = manufactured_by_name(suite.solution);
  if (suite.degrees.empty()) throw std::invalid_argument("convergence suite: no degrees");
  SuiteResult result;
  auto run_one = [&](const std::shared_ptr<PolyMesh>& mesh, int p, const std::string& tag) {
    ErrorReport r = run_manufactured(sol, mesh, p, suite.options).report;
    r.run_id = suite.run_id + "/" + tag;
    if (!suite.record_wall_time) r.wall_s = 0.0;
    if (progress)
      *progress << r.run_id << " p=" << p << " h=" << std::setprecision(4) << r.h << " dofs=" << r.dofs
                << " energy=" << std::setprecision(6) << r.err_energy << std::endl;
    result.rows.push_back(r);
  };

  VerificationMeshSpec spec;
  spec.lloyd_iters = suite.lloyd_iters;
  spec.seed = suite.seed;
  spec.tau = suite.tau;
  if (suite.mode == ConvergenceSuite::Mode::h) {
    if (suite.hs.size() < 2) throw std::invalid_argument("convergence suite: h mode needs at least two sizes");
    std::vector<std::shared_ptr<PolyMesh>> meshes;
    for (double h : suite.hs) {
      spec.target_h = h;
      meshes.push_back(verification_mesh(sol, spec));
    }
    for (int p : suite.degrees) {
      std::vector<double> errs, hs;
      for (std::size_t i = 0; i < meshes.size(); ++i) {
        run_one(meshes[i], p, "p" + std::to_string(p) + "-h" + std::to_string(i));
        errs.push_back(result.rows.back().err_energy);
        hs.push_back(result.rows.back().h);
      }
      result.rates.push_back({p, convergence_rates(errs, hs)});
    }
  } else {
    spec.n_elements = suite.fixed_elements;
    auto mesh = verification_mesh(sol, spec);
    for (int p : suite.degrees) run_one(mesh, p, "p" + std::to_string(p));
  }
  return result;
}

void write_suite_csv(std::ostream& os, const SuiteResult& result) {
  write_error_csv_header(os);
  for (const auto& r : result.rows) write_error_csv_row(os, r);
}

void write_rates_csv(std::ostream& os, const SuiteResult& result) {
  os << "p,pairwise,least_squares\n";
  os << std::setprecision(6);
  for (const auto& [p, rates] : result.rates) {
    os << p << ",";
    for (std::size_t i = 0; i < rates.pairwise.size(); ++i) os << (i ? " " : "") << rates.pairwise[i];
    os << "," << rates.least_squares << "\n";
  }
}

}  // namespace polydg
