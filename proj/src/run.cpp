#include "polydg/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polydg/output.hpp"
#include "polydg/parallel.hpp"

namespace polydg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Field readers. Every failure names the JSON path.

class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
  Node operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) throw ConfigError(child(key), "missing field");
    return Node(j_->at(key), child(key));
  }
  Node at(std::size_t i) const { return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]"); }
  std::size_t size() const { return j_->size(); }

  void only(std::initializer_list<const char*> keys) const {
    if (!j_->is_object()) fail("expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_->items())
      if (!allowed.count(k) && k != "description") throw ConfigError(child(k), "unknown field");
  }
  void array() const {
    if (!j_->is_array()) fail("expected an array");
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }
  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }
  int count(int min) const {
    const long long v = integer();
    if (v < min) fail("must be >= " + std::to_string(min));
    return static_cast<int>(v);
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  Vec2 point() const {
    if (!j_->is_array() || j_->size() != 2) fail("expected [x, y]");
    return {at(0).number(), at(1).number()};
  }
  Box box() const {
    if (!j_->is_array() || j_->size() != 4) fail("expected [x_min, y_min, x_max, y_max]");
    Box b{{at(0).number(), at(1).number()}, {at(2).number(), at(3).number()}};
    if (!(b.width() > 0.0 && b.height() > 0.0)) fail("box has zero area");
    return b;
  }
  std::vector<Vec2> points() const {
    array();
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).point());
    return out;
  }

  template <class F>
  auto convert(F&& f) const {
    try {
      return f(string());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json* j_;
  std::string path_;
};

template <class T>
void read_opt(const Node& n, const char* key, T& out) {
  if (!n.has(key)) return;
  const Node c = n[key];
  if constexpr (std::is_same_v<T, double>)
    out = c.number();
  else if constexpr (std::is_same_v<T, bool>)
    out = c.boolean();
  else if constexpr (std::is_same_v<T, std::string>)
    out = c.string();
  else
    out = static_cast<T>(c.integer());
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
}

void check_version(const Node& root) {
  if (!root.raw().is_object()) root.fail("expected an object");
  const long long v = root["schema_version"].integer();
  if (v != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(v) + " (expected " +
                                             std::to_string(kConfigSchemaVersion) + ")");
}

Subdomain read_label(const Node& n) { return n.convert(subdomain_from_string); }

PenaltyParams read_penalties(const Node& n) {
  n.only({"elastic", "poro", "acoustic"});
  PenaltyParams p;
  if (n.has("elastic")) p.elastic = n["elastic"].positive();
  if (n.has("poro")) p.poro = n["poro"].positive();
  if (n.has("acoustic")) p.acoustic = n["acoustic"].positive();
  return p;
}

template <class M, class F>
void read_material_list(const Node& list, MaterialTable& table, F&& read_one) {
  list.array();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node item = list.at(i);
    int region = 0;
    if (item.has("region")) region = item["region"].count(0);
    M m = read_one(item);
    try {
      m.validate();
    } catch (const std::exception& e) {
      item.fail(e.what());
    }
    table.set(region, m);
  }
}

MaterialTable read_materials(const Node& n) {
  n.only({"elastic", "poro", "acoustic"});
  MaterialTable t;
  if (n.has("elastic"))
    read_material_list<ElasticMaterial>(n["elastic"], t, [](const Node& m) {
      m.only({"region", "rho", "lambda", "mu", "zeta"});
      ElasticMaterial e;
      e.rho = m["rho"].number();
      e.lambda = m["lambda"].number();
      e.mu = m["mu"].number();
      read_opt(m, "zeta", e.zeta);
      return e;
    });
  if (n.has("poro"))
    read_material_list<PoroMaterial>(n["poro"], t, [](const Node& m) {
      m.only({"region", "rho_f", "rho_s", "phi", "a", "eta", "k", "m", "beta", "lambda", "mu"});
      PoroMaterial p;
      p.rho_f = m["rho_f"].number();
      p.rho_s = m["rho_s"].number();
      p.phi = m["phi"].number();
      p.a = m["a"].number();
      p.eta = m["eta"].number();
      p.k = m["k"].number();
      p.m = m["m"].number();
      p.beta = m["beta"].number();
      p.lambda = m["lambda"].number();
      p.mu = m["mu"].number();
      return p;
    });
  if (n.has("acoustic"))
    read_material_list<AcousticMaterial>(n["acoustic"], t, [](const Node& m) {
      m.only({"region", "rho_a", "c"});
      return AcousticMaterial{m["rho_a"].number(), m["c"].number()};
    });
  return t;
}

MeshConfig read_mesh(const Node& n) {
  MeshConfig m;
  const std::string type = n["type"].string();
  if (type == "voronoi") {
    n.only({"type", "domain", "n_elements", "target_h", "lloyd_iters", "seed", "label", "regions"});
    m.type = MeshConfig::Type::voronoi;
    m.domain = n["domain"].box();
  } else if (type == "blocks") {
    n.only({"type", "blocks", "target_h", "lloyd_iters", "seed"});
    m.type = MeshConfig::Type::blocks;
    if (n.has("target_h")) m.target_h = n["target_h"].positive();
    const Node list = n["blocks"];
    list.array();
    if (list.size() == 0) list.fail("needs at least one block");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node b = list.at(i);
      b.only({"box", "n_elements", "label", "region"});
      MeshBlock blk;
      blk.box = b["box"].box();
      // with target_h the counts are derived from block areas
      if (m.target_h <= 0.0 || b.has("n_elements")) blk.n_elements = b["n_elements"].count(1);
      blk.label = read_label(b["label"]);
      if (b.has("region")) blk.region = b["region"].count(0);
      m.blocks.push_back(blk);
    }
  } else if (type == "structured") {
    n.only({"type", "domain", "nx", "ny", "triangles", "label", "regions"});
    m.type = MeshConfig::Type::structured;
    m.domain = n["domain"].box();
    m.nx = n["nx"].count(1);
    m.ny = n["ny"].count(1);
    read_opt(n, "triangles", m.triangles);
  } else if (type == "file") {
    n.only({"type", "path", "regions"});
    m.type = MeshConfig::Type::file;
    m.path = n["path"].string();
  } else if (type == "verification") {
    n.only({"type", "n_elements", "target_h", "lloyd_iters", "seed"});
    m.type = MeshConfig::Type::verification;
  } else {
    n["type"].fail("unknown mesh type '" + type + "' (voronoi, blocks, structured, file, verification)");
  }
  if (n.has("n_elements")) m.n_elements = n["n_elements"].count(1);
  if (n.has("target_h")) m.target_h = n["target_h"].positive();
  if ((m.type == MeshConfig::Type::voronoi || m.type == MeshConfig::Type::verification) &&
      (m.n_elements > 0) == (m.target_h > 0.0))
    n.fail("give exactly one of n_elements and target_h");
  if (n.has("lloyd_iters")) m.lloyd_iters = n["lloyd_iters"].count(0);
  if (n.has("seed")) m.seed = static_cast<std::uint64_t>(n["seed"].count(0));
  if (n.has("label")) m.label = read_label(n["label"]);
  if (n.has("regions")) {
    const Node list = n["regions"];
    list.array();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node r = list.at(i);
      r.only({"box", "label", "region"});
      RegionRule rule;
      rule.box = r["box"].box();
      rule.label = read_label(r["label"]);
      if (r.has("region")) rule.region = r["region"].count(0);
      m.regions.push_back(rule);
    }
  }
  return m;
}

Wavelet read_wavelet(const Node& n, const fs::path& base) {
  Wavelet w;
  const std::string type = n["type"].string();
  if (type == "ricker") {
    n.only({"type", "amplitude", "peak_frequency", "beta_p", "t0"});
    const double amp = n.has("amplitude") ? n["amplitude"].number() : 1.0;
    const double t0 = n.has("t0") ? n["t0"].number() : 0.0;
    if (n.has("peak_frequency") == n.has("beta_p")) n.fail("give exactly one of peak_frequency and beta_p");
    if (n.has("beta_p")) {
      w = Wavelet::ricker_from_beta(amp, n["beta_p"].positive(), t0);
    } else {
      w.amplitude = amp;
      w.peak_frequency = n["peak_frequency"].positive();
      w.t0 = t0;
    }
  } else if (type == "samples") {
    n.only({"type", "file", "amplitude"});
    fs::path p = n["file"].string();
    if (p.is_relative()) p = base / p;
    try {
      w = Wavelet::from_samples_file(p.string());
    } catch (const std::exception& e) {
      n["file"].fail(e.what());
    }
    if (n.has("amplitude")) w.amplitude = n["amplitude"].number();
  } else {
    n["type"].fail("unknown wavelet type '" + type + "' (ricker, samples)");
  }
  try {
    w.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
  return w;
}

SourceConfig read_source(const Node& n, const fs::path& base) {
  SourceConfig s;
  const std::string type = n["type"].string();
  if (type == "point_force") {
    n.only({"type", "field", "position", "direction", "wavelet"});
    s.type = SourceConfig::Type::point_force;
    s.position = n["position"].point();
    s.direction = n["direction"].point();
  } else if (type == "moment_tensor") {
    n.only({"type", "field", "position", "moment", "fault", "wavelet"});
    s.type = SourceConfig::Type::moment_tensor;
    s.position = n["position"].point();
    if (n.has("moment") == n.has("fault")) n.fail("give exactly one of moment and fault");
    if (n.has("moment")) {
      const Node m = n["moment"];
      if (!m.raw().is_array() || m.size() != 2) m.fail("expected [[m_xx, m_xy], [m_yx, m_yy]]");
      const Vec2 r0 = m.at(0).point(), r1 = m.at(1).point();
      s.moment << r0.x(), r0.y(), r1.x(), r1.y();
    } else {
      const Node f = n["fault"];
      f.only({"m0_over_volume", "normal", "slip"});
      s.moment = moment_tensor(f["m0_over_volume"].number(), f["normal"].point(), f["slip"].point());
    }
  } else if (type == "disk") {
    n.only({"type", "field", "centers", "radius", "wavelet"});
    s.type = SourceConfig::Type::disk;
    s.field = "phi";
    s.centers = n["centers"].points();
    s.radius = n["radius"].positive();
  } else {
    n["type"].fail("unknown source type '" + type + "' (point_force, moment_tensor, disk)");
  }
  if (n.has("field")) s.field = n["field"].string();
  if (s.field != "u" && s.field != "w" && s.field != "phi") n["field"].fail("expected u, w or phi");
  if (s.type == SourceConfig::Type::disk && s.field != "phi") n["field"].fail("disk sources act on phi");
  if (s.type != SourceConfig::Type::disk && s.field == "phi") n["field"].fail("phi takes disk sources only");
  s.wavelet = read_wavelet(n["wavelet"], base);
  return s;
}

void read_time(const Node& n, NewmarkParams& scheme, double& final_time) {
  n.only({"scheme", "beta", "gamma", "dt", "final_time"});
  const std::string kind = n["scheme"].string();
  const double dt = n["dt"].positive();
  if (kind == "leapfrog") {
    if (n.has("beta") || n.has("gamma")) n.fail("leapfrog takes no beta/gamma");
    scheme = NewmarkParams::leapfrog(dt);
  } else if (kind == "newmark") {
    scheme = {0.25, 0.5, dt};
    read_opt(n, "beta", scheme.beta);
    read_opt(n, "gamma", scheme.gamma);
  } else {
    n["scheme"].fail("expected newmark or leapfrog");
  }
  try {
    scheme.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
  final_time = n["final_time"].number();
  if (!(final_time >= dt)) n["final_time"].fail("must be >= dt");
  const double steps = final_time / dt;
  if (std::abs(steps - std::round(steps)) > 1e-6) n["final_time"].fail("must be a whole number of steps");
}

SolveConfig read_solver(const Node& n) {
  n.only({"method", "preconditioner", "rel_tol", "max_iters"});
  SolveConfig c;
  if (n.has("method")) {
    const std::string m = n["method"].string();
    if (m == "automatic") c.method = SolveConfig::Method::automatic;
    else if (m == "direct") c.method = SolveConfig::Method::direct;
    else if (m == "cg") c.method = SolveConfig::Method::cg;
    else n["method"].fail("expected automatic, direct or cg");
  }
  if (n.has("preconditioner")) {
    const std::string p = n["preconditioner"].string();
    if (p == "none") c.preconditioner = SolveConfig::Preconditioner::none;
    else if (p == "block_diagonal") c.preconditioner = SolveConfig::Preconditioner::block_diagonal;
    else n["preconditioner"].fail("expected none or block_diagonal");
  }
  if (n.has("rel_tol")) c.rel_tol = n["rel_tol"].positive();
  if (n.has("max_iters")) c.max_iters = n["max_iters"].count(1);
  return c;
}

OutputConfig read_output(const Node& n) {
  n.only({"directory", "energy_cadence", "snapshot_times", "probes", "probe_cadence", "wall_time_in_csv"});
  OutputConfig o;
  read_opt(n, "directory", o.directory);
  if (n.has("energy_cadence")) o.energy_cadence = n["energy_cadence"].count(1);
  if (n.has("probe_cadence")) o.probe_cadence = n["probe_cadence"].count(1);
  if (n.has("snapshot_times")) {
    const Node list = n["snapshot_times"];
    list.array();
    for (std::size_t i = 0; i < list.size(); ++i) o.snapshot_times.push_back(list.at(i).number());
  }
  if (n.has("probes")) o.probes = n["probes"].points();
  read_opt(n, "wall_time_in_csv", o.wall_time_in_csv);
  return o;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse_run_document(json doc, bool desk_scale, const fs::path& base) {
  if (doc.is_object() && doc.contains("desk_scale")) {
    json patch = doc["desk_scale"];
    doc.erase("desk_scale");
    if (desk_scale) doc.merge_patch(patch);
  }
  const Node root(doc, "");
  check_version(root);
  root.only({"schema_version", "name", "kind", "degree", "mesh", "penalties", "materials", "boundary", "interface",
             "sources", "manufactured", "time", "solver", "output"});
  RunConfig c;
  read_opt(root, "name", c.name);
  read_opt(root, "manufactured", c.manufactured);
  std::optional<ManufacturedSolution> sol;
  if (!c.manufactured.empty()) sol = root["manufactured"].convert(manufactured_by_name);
  if (root.has("kind"))
    c.kind = root["kind"].convert(problem_kind_from_string);
  else if (sol)
    c.kind = sol->kind;
  else
    root["kind"];  // reports the missing field
  if (sol && sol->kind != c.kind) root["kind"].fail("does not match the manufactured solution");
  c.degree = root["degree"].count(1);
  c.mesh = read_mesh(root["mesh"]);
  if (c.mesh.type == MeshConfig::Type::verification && !sol)
    root["mesh"]["type"].fail("verification meshes need a manufactured solution");
  if (root.has("penalties")) c.penalties = read_penalties(root["penalties"]);
  if (sol) {
    if (root.has("materials")) root["materials"].fail("materials come from the manufactured solution");
    c.materials = sol->materials();
  } else {
    c.materials = read_materials(root["materials"]);
  }
  if (root.has("boundary")) {
    const Node b = root["boundary"];
    b.only({"default", "rules"});
    if (b.has("default")) c.default_boundary = b["default"].convert(face_tag_from_string);
    if (b.has("rules")) {
      const Node list = b["rules"];
      list.array();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const Node r = list.at(i);
        r.only({"side", "box", "tag"});
        BoundaryRule rule;
        if (r.has("side") == r.has("box")) r.fail("give exactly one of side and box");
        if (r.has("side")) {
          rule.side = r["side"].string();
          static const std::set<std::string> sides{"left", "right", "bottom", "top", "all"};
          if (!sides.count(rule.side)) r["side"].fail("expected left, right, bottom, top or all");
        } else {
          rule.box = r["box"].box();
        }
        rule.tag = r["tag"].convert(face_tag_from_string);
        if (rule.tag != FaceTag::dirichlet && rule.tag != FaceTag::neumann) r["tag"].fail("expected dirichlet or neumann");
        c.boundary_rules.push_back(rule);
      }
    }
  }
  if (root.has("interface")) {
    const Node n = root["interface"];
    n.only({"tau", "rules"});
    auto tau_of = [](const Node& t) {
      const double v = t.number();
      if (!(v >= 0.0 && v <= 1.0)) t.fail("tau must lie in [0, 1]");
      return v;
    };
    if (n.has("tau")) c.tau = tau_of(n["tau"]);
    if (n.has("rules")) {
      const Node list = n["rules"];
      list.array();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const Node r = list.at(i);
        r.only({"box", "tau"});
        c.interface_rules.push_back({r["box"].box(), tau_of(r["tau"])});
      }
    }
  }
  if (root.has("sources")) {
    if (sol) root["sources"].fail("manufactured runs take their load from the exact solution");
    const Node list = root["sources"];
    list.array();
    for (std::size_t i = 0; i < list.size(); ++i) c.sources.push_back(read_source(list.at(i), base));
  }
  read_time(root["time"], c.scheme, c.final_time);
  if (root.has("solver")) c.solve = read_solver(root["solver"]);
  if (root.has("output")) c.output = read_output(root["output"]);
  for (std::size_t i = 0; i < c.output.snapshot_times.size(); ++i) {
    const double t = c.output.snapshot_times[i];
    const double k = t / c.scheme.dt;
    if (t < 0.0 || t > c.final_time + 1e-12 || std::abs(k - std::round(k)) > 1e-6)
      throw ConfigError("output.snapshot_times[" + std::to_string(i) + "]",
                        "must be a multiple of dt within [0, final_time]");
  }
  for (const auto& s : c.sources) {
    if (s.field == "w" && c.kind == ProblemKind::elastic) throw ConfigError("sources", "elastic runs have no w field");
    if (s.field == "phi" && c.kind != ProblemKind::coupled) throw ConfigError("sources", "only coupled runs have phi");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Mesh and system

bool on_side(const std::string& side, const Vec2& m, const Box& bb) {
  const double tol = 1e-9 * std::max(bb.width(), bb.height());
  if (side == "all") return true;
  if (side == "left") return std::abs(m.x() - bb.lo.x()) <= tol;
  if (side == "right") return std::abs(m.x() - bb.hi.x()) <= tol;
  if (side == "bottom") return std::abs(m.y() - bb.lo.y()) <= tol;
  return std::abs(m.y() - bb.hi.y()) <= tol;
}

void apply_regions(PolyMesh& m, const MeshConfig& mc, bool relabel_all) {
  std::vector<Subdomain> labels = m.subdomains();
  std::vector<int> regions = m.regions();
  if (relabel_all) std::fill(labels.begin(), labels.end(), mc.label);
  for (int e = 0; e < m.n_elements(); ++e)
    for (const auto& r : mc.regions)
      if (r.box.contains(m.centroid(e), 1e-12 * std::max(r.box.width(), r.box.height()))) {
        labels[e] = r.label;
        regions[e] = r.region;
      }
  m.set_labels(std::move(labels));
  m.set_regions(std::move(regions));
}

void check_labels(const PolyMesh& m, ProblemKind kind) {
  for (int e = 0; e < m.n_elements(); ++e) {
    const Subdomain s = m.subdomain(e);
    const bool ok = kind == ProblemKind::elastic ? s == Subdomain::elastic
                    : kind == ProblemKind::poro  ? s == Subdomain::poroelastic
                                                 : s != Subdomain::elastic;
    if (!ok)
      throw ConfigError("mesh", "element " + std::to_string(e) + " is labelled " + to_string(s) + ", which a " +
                                    to_string(kind) + " run does not accept");
  }
}

void add_source(BlockSystem& sys, const SourceConfig& s) {
  VectorXd full = VectorXd::Zero(sys.size());
  if (s.field == "phi") {
    full.segment(sys.layout.phi_offset, sys.layout.n_phi) = disk_indicator_load(*sys.acoustic_space, s.centers, s.radius);
  } else {
    const DgSpace& sp = *sys.vector_space;
    const VectorXd local = s.type == SourceConfig::Type::point_force ? point_force_load(sp, s.position, s.direction)
                                                                      : double_couple_load(sp, s.position, s.moment);
    const int offset = s.field == "u" ? sys.layout.u_offset : sys.layout.w_offset;
    full.segment(offset, sp.n_dofs()) = local;
  }
  const Wavelet w = s.wavelet;
  sys.load.add([w](double t) { return w(t); }, std::move(full));
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig parse_run_config(const std::string& json_text, bool desk_scale) {
  return parse_run_document(parse_document(json_text), desk_scale, fs::current_path());
}

RunConfig load_run_config(const std::string& path, bool desk_scale) {
  return parse_run_document(parse_document(read_text(path)), desk_scale, fs::path(path).parent_path());
}

ConvergenceSuite parse_suite_config(const std::string& json_text) {
  const json doc = parse_document(json_text);
  const Node root(doc, "");
  check_version(root);
  root.only({"schema_version", "suite"});
  const Node n = root["suite"];
  n.only({"run_id", "solution", "mode", "hs", "degrees", "fixed_elements", "lloyd_iters", "seed", "tau", "time",
          "penalties", "solver", "wall_time_in_csv"});
  ConvergenceSuite s;
  read_opt(n, "run_id", s.run_id);
  s.solution = n["solution"].string();
  const ManufacturedSolution sol = n["solution"].convert(manufactured_by_name);
  s.options = default_run_options(sol.kind);
  const std::string mode = n["mode"].string();
  if (mode == "h") {
    s.mode = ConvergenceSuite::Mode::h;
    const Node hs = n["hs"];
    hs.array();
    if (hs.size() < 2) hs.fail("needs at least two sizes");
    for (std::size_t i = 0; i < hs.size(); ++i) s.hs.push_back(hs.at(i).positive());
  } else if (mode == "p") {
    s.mode = ConvergenceSuite::Mode::p;
    s.fixed_elements = n["fixed_elements"].count(1);
  } else {
    n["mode"].fail("expected h or p");
  }
  const Node ds = n["degrees"];
  ds.array();
  if (ds.size() == 0) ds.fail("needs at least one degree");
  for (std::size_t i = 0; i < ds.size(); ++i) s.degrees.push_back(ds.at(i).count(1));
  if (n.has("lloyd_iters")) s.lloyd_iters = n["lloyd_iters"].count(0);
  if (n.has("seed")) s.seed = static_cast<std::uint64_t>(n["seed"].count(0));
  if (n.has("tau")) s.tau = n["tau"].number();
  if (n.has("time")) read_time(n["time"], s.options.scheme, s.options.final_time);
  if (n.has("penalties")) s.options.penalties = read_penalties(n["penalties"]);
  if (n.has("solver")) s.options.solve = read_solver(n["solver"]);
  bool wall = false;
  read_opt(n, "wall_time_in_csv", wall);
  s.record_wall_time = wall;
  return s;
}

ConvergenceSuite load_suite_config(const std::string& path) { return parse_suite_config(read_text(path)); }

std::shared_ptr<PolyMesh> build_case_mesh(const RunConfig& cfg) {
  const MeshConfig& mc = cfg.mesh;
  if (mc.type == MeshConfig::Type::verification) {
    VerificationMeshSpec spec;
    spec.target_h = mc.target_h;
    spec.n_elements = mc.n_elements;
    spec.lloyd_iters = mc.lloyd_iters;
    spec.seed = mc.seed;
    spec.tau = cfg.tau;
    return verification_mesh(manufactured_by_name(cfg.manufactured), spec);
  }
  PolyMesh m;
  try {
    switch (mc.type) {
      case MeshConfig::Type::voronoi:
        m = mc.target_h > 0.0 ? voronoi_mesh_for_h(mc.domain, mc.target_h, mc.lloyd_iters, mc.seed)
                              : generate_voronoi_mesh(mc.domain, mc.n_elements, mc.lloyd_iters, mc.seed);
        apply_regions(m, mc, true);
        break;
      case MeshConfig::Type::blocks:
        m = mc.target_h > 0.0 ? block_voronoi_mesh_for_h(mc.blocks, mc.target_h, mc.lloyd_iters, mc.seed)
                              : generate_block_voronoi_mesh(mc.blocks, mc.lloyd_iters, mc.seed);
        break;
      case MeshConfig::Type::structured:
        m = structured_mesh(mc.domain, mc.nx, mc.ny, mc.triangles);
        apply_regions(m, mc, true);
        break;
      case MeshConfig::Type::file:
        m = read_mesh_file(mc.path);
        apply_regions(m, mc, false);
        break;
      default:
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("mesh", e.what());
  }
  check_labels(m, cfg.kind);
  const Box bb = m.bounding_box();
  const auto rules = cfg.boundary_rules;
  const FaceTag fallback = cfg.default_boundary;
  BoundaryTagger tagger = [rules, fallback, bb](const Vec2& mid, const Vec2&) -> std::optional<FaceTag> {
    FaceTag tag = fallback;
    for (const auto& r : rules) {
      const bool hit = r.box ? r.box->contains(mid, 1e-9 * std::max(r.box->width(), r.box->height()))
                             : on_side(r.side, mid, bb);
      if (hit) tag = r.tag;
    }
    return tag;
  };
  const double tau0 = cfg.tau;
  const auto irules = cfg.interface_rules;
  InterfaceLawFn tau = [tau0, irules](const Vec2& mid) {
    double t = tau0;
    for (const auto& r : irules)
      if (r.box.contains(mid, 1e-9 * std::max(r.box.width(), r.box.height()))) t = r.tau;
    return t;
  };
  return std::make_shared<PolyMesh>(classify_boundary(m, tagger, tau));
}

BlockSystem build_case_system(const RunConfig& cfg, std::shared_ptr<const PolyMesh> mesh) {
  try {
    cfg.materials.check_covers(*mesh);
  } catch (const std::exception& e) {
    throw ConfigError("materials", e.what());
  }
  BlockSystem sys = build_block_system(cfg.kind, mesh, cfg.degree, cfg.materials, cfg.penalties);
  if (!cfg.manufactured.empty()) {
    sys.load = manufactured_load(sys, manufactured_by_name(cfg.manufactured), cfg.penalties);
  } else {
    sys.load = LoadFunction(sys.size());
    for (std::size_t i = 0; i < cfg.sources.size(); ++i) {
      try {
        add_source(sys, cfg.sources[i]);
      } catch (const std::exception& e) {
        throw ConfigError("sources[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  return sys;
}

RunOutcome run_case(const RunConfig& cfg) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);

  auto mesh = build_case_mesh(cfg);
  const BlockSystem sys = build_case_system(cfg, mesh);
  std::optional<ManufacturedSolution> sol;
  if (!cfg.manufactured.empty()) sol = manufactured_by_name(cfg.manufactured);

  VectorXd X = VectorXd::Zero(sys.size()), Z = VectorXd::Zero(sys.size());
  if (sol) project_exact_state(sys, *sol, 0.0, X, Z);
  NewmarkIntegrator integ(SecondOrderSystem::from(sys), cfg.scheme, cfg.solve);

  RunOutcome out;
  out.dofs = sys.size();
  out.n_elements = mesh->n_elements();
  out.h = mesh->max_diameter();

  EnergyMonitor energy(sys, cfg.output.energy_cadence);
  std::vector<Observer> observers{energy.observer()};
  std::optional<ErrorHistory> history;
  if (sol) {
    history.emplace(sys, *sol);
    observers.push_back(history->observer());
  }
  std::optional<ProbeRecorder> probes;
  if (!cfg.output.probes.empty()) {
    try {
      probes.emplace(sys, cfg.output.probes, cfg.output.probe_cadence);
    } catch (const std::exception& e) {
      throw ConfigError("output.probes", e.what());
    }
    observers.push_back(probes->observer());
  }
  std::vector<int> snapshot_steps;
  for (double t : cfg.output.snapshot_times) snapshot_steps.push_back(static_cast<int>(std::lround(t / cfg.scheme.dt)));
  int snapshot_index = 0;
  observers.push_back([&](const State& s) {
    for (std::size_t i = 0; i < snapshot_steps.size(); ++i) {
      if (snapshot_steps[i] != s.step) continue;
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%04d.vtk", snapshot_index++);
      std::ostringstream title;
      title << cfg.name << " t=" << s.t;
      write_file(dir / name, [&](std::ostream& os) { write_vtk_snapshot(os, sys, s, title.str()); });
      out.files.push_back(name);
    }
  });

  out.final_state = integrate(integ, integ.initial_state(X, Z, 0.0), cfg.final_time, observers);
  out.steps = out.final_state.step;
  for (const auto& r : energy.records()) {
    out.max_energy = std::max(out.max_energy, r.total());
    out.max_source_work_abs = std::max(out.max_source_work_abs, r.source_work_abs);
    out.finite = out.finite && std::isfinite(r.total());
  }
  if (!energy.records().empty()) out.final_energy = energy.records().back();

  write_file(dir / "energy.csv", [&](std::ostream& os) { energy.write_csv(os); });
  out.files.push_back("energy.csv");
  if (probes) {
    write_file(dir / "probes.csv", [&](std::ostream& os) { probes->write_csv(os); });
    out.files.push_back("probes.csv");
  }
  out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (sol) {
    ErrorReport r = compute_errors(sys, *sol, out.final_state, &*history);
    r.run_id = cfg.name;
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.wall_s = cfg.output.wall_time_in_csv ? out.wall_s : 0.0;
    out.errors = r;
    write_file(dir / "errors.csv", [&](std::ostream& os) {
      write_error_csv_header(os);
      write_error_csv_row(os, r);
    });
    out.files.push_back("errors.csv");
  }

  json meta;
  meta["name"] = cfg.name;
  meta["schema_version"] = cfg.schema_version;
  meta["kind"] = to_string(cfg.kind);
  meta["started_utc"] = started;
  meta["finished_utc"] = utc_now();
  meta["wall_s"] = out.wall_s;
  meta["dofs"] = out.dofs;
  meta["n_elements"] = out.n_elements;
  meta["h"] = out.h;
  meta["degree"] = cfg.degree;
  meta["steps"] = out.steps;
  meta["dt"] = cfg.scheme.dt;
  meta["solver"] = integ.solver_method();
  meta["threads"] = worker_count();
  meta["files"] = out.files;
  write_file(dir / "metadata.json", [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
  return out;
}

std::vector<std::string> dump_operators(const BlockSystem& sys, const std::string& directory) {
  fs::create_directories(directory);
  const std::vector<std::pair<std::string, const SparseOperator*>> ops{
      {"M", &sys.M},
      {"D", &sys.D},
      {"A", &sys.A},
      {"mass_rho", &sys.parts.mass_rho},
      {"mass_rho_f", &sys.parts.mass_rho_f},
      {"mass_rho_w", &sys.parts.mass_rho_w},
      {"mass_acoustic", &sys.parts.mass_acoustic},
      {"elastic", &sys.parts.elastic},
      {"divdiv", &sys.parts.divdiv},
      {"acoustic", &sys.parts.acoustic},
      {"coupling", &sys.parts.coupling},
      {"robin", &sys.parts.robin},
      {"mass_eta_over_k", &sys.parts.mass_eta_over_k},
  };
  std::vector<std::string> written;
  for (const auto& [name, op] : ops) {
    if (op->rows() == 0) continue;
    const std::string file = name + ".mtx";
    write_matrix_market_file((fs::path(directory) / file).string(), *op);
    written.push_back(file);
  }
  return written;
}

}  // namespace polydg
