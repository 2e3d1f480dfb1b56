#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polydg/analysis.hpp"
#include "polydg/cases.hpp"
#include "polydg/run.hpp"
#include "polydg/sources.hpp"

namespace py = pybind11;
using namespace polydg;

namespace {

Box box_of(const std::array<double, 4>& d) { return Box{{d[0], d[1]}, {d[2], d[3]}}; }

py::dict report_dict(const ErrorReport& r) {
  py::dict d;
  d["run_id"] = r.run_id;
  d["kind"] = r.kind;
  d["h"] = r.h;
  d["p"] = r.p;
  d["dofs"] = r.dofs;
  d["err_energy"] = r.err_energy;
  d["err_L2_u"] = r.err_L2_u;
  d["err_L2_w"] = r.err_L2_w;
  d["err_L2_phi"] = r.err_L2_phi;
  d["wall_s"] = r.wall_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_polydg, m) {
  m.doc() = "Polytopal discontinuous Galerkin solvers for elastic, poro-elastic and acoustic waves";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<PolyMesh, std::shared_ptr<PolyMesh>>(m, "Mesh")
      .def_property_readonly("n_elements", &PolyMesh::n_elements)
      .def_property_readonly("n_vertices", &PolyMesh::n_vertices)
      .def_property_readonly("n_faces", &PolyMesh::n_faces)
      .def_property_readonly("h", &PolyMesh::max_diameter)
      .def_property_readonly("area", &PolyMesh::total_area)
      .def("vertices", [](const PolyMesh& mesh) {
        Eigen::MatrixX2d v(mesh.n_vertices(), 2);
        for (int i = 0; i < mesh.n_vertices(); ++i) v.row(i) = mesh.vertex(i).transpose();
        return v;
      })
      .def("elements", [](const PolyMesh& mesh) { return mesh.elements(); })
      .def("diameters", [](const PolyMesh& mesh) {
        std::vector<double> d(mesh.n_elements());
        for (int e = 0; e < mesh.n_elements(); ++e) d[e] = mesh.diameter(e);
        return d;
      })
      .def("regularity", [](const PolyMesh& mesh) {
        const auto r = regularity_report(mesh);
        return py::make_tuple(r.max_ratio, r.element_ratio);
      });

  m.def(
      "voronoi_mesh",
      [](std::array<double, 4> domain, int n, int lloyd, std::uint64_t seed) {
        return std::make_shared<PolyMesh>(generate_voronoi_mesh(box_of(domain), n, lloyd, seed));
      },
      py::arg("domain"), py::arg("n_elements"), py::arg("lloyd_iters") = 1, py::arg("seed") = 1,
      "Clipped Voronoi mesh of (x0, y0, x1, y1).");

  m.def(
      "verification_mesh",
      [](const std::string& solution, int n, double target_h, std::uint64_t seed, double tau, int lloyd_iters) {
        VerificationMeshSpec spec;
        spec.lloyd_iters = lloyd_iters;
        spec.n_elements = n;
        spec.target_h = target_h;
        spec.seed = seed;
        spec.tau = tau;
        return verification_mesh(manufactured_by_name(solution), spec);
      },
      py::arg("solution"), py::arg("n_elements") = 0, py::arg("target_h") = 0.0, py::arg("seed") = 1,
      py::arg("tau") = 1.0, py::arg("lloyd_iters") = 1);

  m.def(
      "assemble",
      [](const std::string& kind, std::shared_ptr<PolyMesh> mesh, int degree, const std::string& solution) {
        const auto sol = manufactured_by_name(solution);
        const BlockSystem sys = build_block_system(problem_kind_from_string(kind), mesh, degree, sol.materials(), {});
        py::dict d;
        d["M"] = sys.M.to_eigen();
        d["D"] = sys.D.to_eigen();
        d["A"] = sys.A.to_eigen();
        d["layout"] = py::dict(py::arg("u") = py::make_tuple(sys.layout.u_offset, sys.layout.n_u),
                               py::arg("w") = py::make_tuple(sys.layout.w_offset, sys.layout.n_w),
                               py::arg("phi") = py::make_tuple(sys.layout.phi_offset, sys.layout.n_phi));
        return d;
      },
      py::arg("kind"), py::arg("mesh"), py::arg("degree"), py::arg("materials_of") = "elastic",
      "Mass, damping and stiffness matrices (scipy.sparse) with the materials of a manufactured case.");

  m.def(
      "run_manufactured",
      [](const std::string& solution, std::shared_ptr<PolyMesh> mesh, int degree, double final_time, double dt,
         const std::string& scheme) {
        const auto sol = manufactured_by_name(solution);
        ManufacturedRunOptions opt = default_run_options(sol.kind);
        if (final_time > 0) opt.final_time = final_time;
        if (dt > 0) opt.scheme.dt = dt;
        if (scheme == "leapfrog") opt.scheme = NewmarkParams::leapfrog(opt.scheme.dt);
        else if (scheme == "newmark") opt.scheme = NewmarkParams{0.25, 0.5, opt.scheme.dt};
        else if (!scheme.empty()) throw std::invalid_argument("scheme must be newmark or leapfrog");
        py::gil_scoped_release release;
        return run_manufactured(sol, mesh, degree, opt).report;
      },
      py::arg("solution"), py::arg("mesh"), py::arg("degree"), py::arg("final_time") = 0.0, py::arg("dt") = 0.0,
      py::arg("scheme") = "");

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("h", &ErrorReport::h)
      .def_readonly("p", &ErrorReport::p)
      .def_readonly("dofs", &ErrorReport::dofs)
      .def_readonly("err_energy", &ErrorReport::err_energy)
      .def_readonly("err_L2_u", &ErrorReport::err_L2_u)
      .def_readonly("err_L2_w", &ErrorReport::err_L2_w)
      .def_readonly("err_L2_phi", &ErrorReport::err_L2_phi)
      .def("as_dict", &report_dict);

  m.def(
      "convergence_rates",
      [](const std::vector<double>& errors, const std::vector<double>& hs) {
        const auto r = convergence_rates(errors, hs);
        return py::make_tuple(r.pairwise, r.least_squares);
      },
      py::arg("errors"), py::arg("hs"), "(pairwise rates, least-squares slope)");

  m.def(
      "ricker",
      [](double t, double amplitude, double peak_frequency, double t0) {
        Wavelet w;
        w.amplitude = amplitude;
        w.peak_frequency = peak_frequency;
        w.t0 = t0;
        return w(t);
      },
      py::arg("t"), py::arg("amplitude") = 1.0, py::arg("peak_frequency") = 1.0, py::arg("t0") = 0.0);

  m.def(
      "run_config",
      [](const std::string& path, bool desk_scale, const std::string& out_dir) {
        RunConfig cfg = load_run_config(path, desk_scale);
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        RunOutcome r;
        {
          py::gil_scoped_release release;
          r = run_case(cfg);
        }
        py::dict d;
        d["files"] = r.files;
        d["dofs"] = r.dofs;
        d["n_elements"] = r.n_elements;
        d["h"] = r.h;
        d["steps"] = r.steps;
        d["finite"] = r.finite;
        d["max_energy"] = r.max_energy;
        d["final_energy"] = r.final_energy.total();
        d["directory"] = cfg.output.directory;
        if (r.errors) d["errors"] = report_dict(*r.errors);
        return d;
      },
      py::arg("path"), py::arg("desk_scale") = false, py::arg("out_dir") = "");
}
