// polydg command line front end.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "polydg/run.hpp"

namespace fs = std::filesystem;
using namespace polydg;

namespace {

struct VoronoiOverride {
  int n = 0;
  std::uint64_t seed = 1;
  int lloyd = 1;
};

// Tokens like "n=100" "seed=3" "lloyd=1".
VoronoiOverride parse_voronoi(const std::vector<std::string>& tokens) {
  VoronoiOverride v;
  for (const auto& t : tokens) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--voronoi", "expected key=value, got '" + t + "'");
    const std::string key = t.substr(0, eq), value = t.substr(eq + 1);
    try {
      if (key == "n") v.n = std::stoi(value);
      else if (key == "seed") v.seed = std::stoull(value);
      else if (key == "lloyd") v.lloyd = std::stoi(value);
      else throw ConfigError("--voronoi", "unknown key '" + key + "' (n, seed, lloyd)");
    } catch (const std::logic_error&) {
      throw ConfigError("--voronoi", "bad value in '" + t + "'");
    }
  }
  if (v.n < 1) throw ConfigError("--voronoi", "n must be >= 1");
  return v;
}

void apply_mesh_overrides(RunConfig& cfg, const std::string& mesh_file, const std::vector<std::string>& voronoi) {
  if (!mesh_file.empty()) {
    cfg.mesh.type = MeshConfig::Type::file;
    cfg.mesh.path = mesh_file;
  }
  if (!voronoi.empty()) {
    const VoronoiOverride v = parse_voronoi(voronoi);
    if (cfg.mesh.type == MeshConfig::Type::verification) {
      cfg.mesh.target_h = 0.0;
    } else if (cfg.mesh.type != MeshConfig::Type::voronoi) {
      throw ConfigError("--voronoi", "the config mesh has no domain box; use a voronoi or verification mesh");
    }
    cfg.mesh.n_elements = v.n;
    cfg.mesh.target_h = 0.0;
    cfg.mesh.seed = v.seed;
    cfg.mesh.lloyd_iters = v.lloyd;
  }
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discontinuous Galerkin wave solver on polygonal meshes (elastic, poro-elastic, poro-elasto-acoustic)"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one case from a JSON config");
  std::string run_config, out_dir, mesh_file, dump_dir;
  std::vector<std::string> voronoi;
  bool desk = false;
  run->add_option("config", run_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_flag("--desk-scale", desk, "Apply the config's reduced-resolution overrides");
  run->add_option("-o,--output-dir", out_dir, "Override output.directory");
  run->add_option("--mesh", mesh_file, "Mesh file (POLYMESH text format)")->check(CLI::ExistingFile);
  run->add_option("--voronoi", voronoi, "Voronoi mesh on the config domain: n=<N> seed=<S> [lloyd=<k>]")
      ->expected(1, 3);
  run->add_option("--dump-operators", dump_dir, "Also write the assembled operators (Matrix Market) here");

  // converge
  auto* conv = app.add_subcommand("converge", "Run a convergence suite and write its error table");
  std::string suite_config, table_path, rates_path;
  conv->add_option("config", suite_config, "Suite config (JSON)")->required()->check(CLI::ExistingFile);
  conv->add_option("-o,--output", table_path, "Error table CSV (default: <run_id>.csv)");
  conv->add_option("--rates", rates_path, "Rates CSV for h sweeps (default: <run_id>_rates.csv)");

  // regularity
  auto* reg = app.add_subcommand("regularity", "Report polytopic-regularity ratios of a mesh");
  std::string reg_mesh, reg_csv;
  std::vector<std::string> reg_voronoi;
  std::vector<double> reg_domain{0.0, 0.0, 1.0, 1.0};
  reg->add_option("--mesh", reg_mesh, "Mesh file")->check(CLI::ExistingFile);
  reg->add_option("--voronoi", reg_voronoi, "n=<N> seed=<S> [lloyd=<k>]")->expected(1, 3);
  reg->add_option("--domain", reg_domain, "x_min y_min x_max y_max for --voronoi")->expected(4);
  reg->add_option("--csv", reg_csv, "Per-element ratios CSV");

  // dump-operators
  auto* dump = app.add_subcommand("dump-operators", "Assemble a config's operators and write them as Matrix Market");
  std::string dump_config, dump_target;
  bool dump_desk = false;
  dump->add_option("config", dump_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  dump->add_option("directory", dump_target, "Output directory")->required();
  dump->add_flag("--desk-scale", dump_desk, "Apply the config's reduced-resolution overrides");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return guarded([&] {
      RunConfig cfg = load_run_config(run_config, desk);
      if (!out_dir.empty()) cfg.output.directory = out_dir;
      apply_mesh_overrides(cfg, mesh_file, voronoi);
      if (!dump_dir.empty()) {
        auto mesh = build_case_mesh(cfg);
        for (const auto& f : dump_operators(build_case_system(cfg, mesh), dump_dir))
          std::cout << "wrote " << (fs::path(dump_dir) / f).string() << '\n';
      }
      const RunOutcome out = run_case(cfg);
      std::cout << cfg.name << ": " << out.steps << " steps, " << out.dofs << " dofs, " << out.n_elements
                << " elements, h = " << out.h << ", final energy " << out.final_energy.total() << '\n';
      if (out.errors)
        std::cout << "  energy error " << out.errors->err_energy << ", L2(u) " << out.errors->err_L2_u << '\n';
      for (const auto& f : out.files) std::cout << "  " << (fs::path(cfg.output.directory) / f).string() << '\n';
      return 0;
    });
  }
  if (*conv) {
    return guarded([&] {
      const ConvergenceSuite suite = load_suite_config(suite_config);
      const SuiteResult res = run_convergence_suite(suite, &std::cerr);
      const std::string table = table_path.empty() ? suite.run_id + ".csv" : table_path;
      std::ofstream t(table);
      write_suite_csv(t, res);
      std::cout << "wrote " << table << '\n';
      if (suite.mode == ConvergenceSuite::Mode::h) {
        const std::string rates = rates_path.empty() ? suite.run_id + "_rates.csv" : rates_path;
        std::ofstream r(rates);
        write_rates_csv(r, res);
        std::cout << "wrote " << rates << '\n';
        for (const auto& [p, rr] : res.rates) std::cout << "  p=" << p << " slope " << rr.least_squares << '\n';
      }
      return 0;
    });
  }
  if (*reg) {
    return guarded([&] {
      PolyMesh mesh;
      if (!reg_mesh.empty() == !reg_voronoi.empty()) throw ConfigError("regularity", "give exactly one of --mesh and --voronoi");
      if (!reg_mesh.empty()) {
        mesh = read_mesh_file(reg_mesh);
      } else {
        const VoronoiOverride v = parse_voronoi(reg_voronoi);
        const Box box{{reg_domain[0], reg_domain[1]}, {reg_domain[2], reg_domain[3]}};
        mesh = generate_voronoi_mesh(box, v.n, v.lloyd, v.seed);
      }
      const RegularityReport r = regularity_report(mesh);
      std::cout << "elements " << mesh.n_elements() << ", h " << mesh.max_diameter() << ", max ratio " << r.max_ratio
                << " (element " << r.worst_element << ")\n";
      if (!reg_csv.empty()) {
        std::ofstream os(reg_csv);
        os << "element,diameter,area,ratio\n";
        os.precision(12);
        for (int e = 0; e < mesh.n_elements(); ++e)
          os << e << ',' << mesh.diameter(e) << ',' << mesh.area(e) << ',' << r.element_ratio[e] << '\n';
      }
      return 0;
    });
  }
  if (*dump) {
    return guarded([&] {
      const RunConfig cfg = load_run_config(dump_config, dump_desk);
      auto mesh = build_case_mesh(cfg);
      for (const auto& f : dump_operators(build_case_system(cfg, mesh), dump_target))
        std::cout << "wrote " << (fs::path(dump_target) / f).string() << '\n';
      return 0;
    });
  }
  return 0;
}
