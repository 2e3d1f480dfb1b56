#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polydg/cases.hpp"
#include "polydg/sources.hpp"

namespace polydg {

constexpr int kConfigSchemaVersion = 1;

/// Invalid configuration; `path` names the offending field, e.g. "mesh.n_elements".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Elements whose centroid lies in `box` get this label and region; later rules win.
struct RegionRule {
  Box box;
  Subdomain label = Subdomain::elastic;
  int region = 0;
};

struct MeshConfig {
  enum class Type { voronoi, blocks, structured, file, verification };
  Type type = Type::voronoi;
  Box domain;
  int n_elements = 0;
  double target_h = 0.0;
  int lloyd_iters = 1;
  std::uint64_t seed = 1;
  std::vector<MeshBlock> blocks;
  int nx = 1, ny = 1;
  bool triangles = false;
  std::string path;
  Subdomain label = Subdomain::elastic;  // default label for voronoi/structured
  std::vector<RegionRule> regions;
};

/// Boundary faces on `side` (left, right, bottom, top or all of the mesh
/// bounding box), or with midpoint in `box`, get `tag`. Later rules win.
struct BoundaryRule {
  std::string side;
  std::optional<Box> box;
  FaceTag tag = FaceTag::dirichlet;
};

/// Interface faces with midpoint in `box` get permeability tau.
struct InterfaceRule {
  Box box;
  double tau = 1.0;
};

struct SourceConfig {
  enum class Type { point_force, moment_tensor, disk };
  Type type = Type::point_force;
  std::string field = "u";  // u, w or phi
  Vec2 position = Vec2::Zero();
  Vec2 direction{0.0, 1.0};
  Mat2 moment = Mat2::Zero();
  std::vector<Vec2> centers;
  double radius = 0.0;
  Wavelet wavelet;
};

struct OutputConfig {
  std::string directory = "out";
  int energy_cadence = 1;
  std::vector<double> snapshot_times;
  std::vector<Vec2> probes;
  int probe_cadence = 1;
  bool wall_time_in_csv = false;  // false: wall_s = 0 in CSVs, timings go to metadata.json
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "run";
  ProblemKind kind = ProblemKind::elastic;
  MeshConfig mesh;
  int degree = 2;
  PenaltyParams penalties;
  MaterialTable materials;
  double tau = 1.0;
  std::vector<InterfaceRule> interface_rules;
  FaceTag default_boundary = FaceTag::dirichlet;
  std::vector<BoundaryRule> boundary_rules;
  std::vector<SourceConfig> sources;
  std::string manufactured;  // empty: zero initial data, loads from sources
  NewmarkParams scheme;
  double final_time = 1.0;
  SolveConfig solve;
  OutputConfig output;
};

/// Parses a run config. With `desk_scale`, the object under "desk_scale" is
/// merged over the document first (RFC 7386 merge patch). Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, bool desk_scale = false);
RunConfig load_run_config(const std::string& path, bool desk_scale = false);

/// Parses a convergence-suite config ("suite" object). Throws ConfigError.
ConvergenceSuite parse_suite_config(const std::string& json_text);
ConvergenceSuite load_suite_config(const std::string& path);

/// Mesh of a config, classified and tagged.
std::shared_ptr<PolyMesh> build_case_mesh(const RunConfig& cfg);

/// System of a config including its load.
BlockSystem build_case_system(const RunConfig& cfg, std::shared_ptr<const PolyMesh> mesh);

struct RunOutcome {
  State final_state;
  AlgebraicEnergy final_energy;
  double max_energy = 0.0;
  double max_source_work_abs = 0.0;
  bool finite = true;
  std::optional<ErrorReport> errors;
  std::vector<std::string> files;  // written, relative to the output directory
  int dofs = 0;
  int n_elements = 0;
  double h = 0.0;
  int steps = 0;
  double wall_s = 0.0;
};

/// Assembles, integrates and writes energy.csv, probes.csv (when probes are
/// set), snapshot_<k>.vtk, errors.csv (manufactured runs) and metadata.json
/// into cfg.output.directory. Throws std::runtime_error naming the step on a
/// non-finite state.
RunOutcome run_case(const RunConfig& cfg);

/// Writes M, D, A and the named parts of the system as Matrix Market files.
std::vector<std::string> dump_operators(const BlockSystem& sys, const std::string& directory);

}  // namespace polydg
