#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "aefem/config.hpp"
#include "aefem/materials.hpp"
#include "aefem/mesh.hpp"
#include "aefem/run.hpp"
#include "aefem/scenarios.hpp"

namespace py = pybind11;
using namespace aefem;

namespace {

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

Box to_box(const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
  return {to_vec(lo), to_vec(hi)};
}

py::dict record_dict(const IterationRecord& r) {
  py::dict d;
  d["iter"] = r.iter;
  d["n_p"] = r.n_p;
  d["n_u"] = r.n_u;
  d["eta_p"] = r.eta_p;
  d["eta_u"] = r.eta_u;
  d["eta_total"] = r.eta_total;
  d["eps_fem"] = r.eps_fem;
  d["eps_pml"] = r.eps_pml;
  d["err_p"] = r.err_p;
  d["err_u"] = r.err_u;
  d["relative_residual"] = r.relative_residual;
  d["seconds"] = r.seconds;
  return d;
}

py::array_t<double> vertex_array(const TetMesh& m) {
  py::array_t<double> a({static_cast<py::ssize_t>(m.num_vertices()), py::ssize_t{3}});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.num_vertices(); ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = m.vertices[i][j];
  return a;
}

py::array_t<int> tet_array(const TetMesh& m) {
  py::array_t<int> a({static_cast<py::ssize_t>(m.num_tets()), py::ssize_t{4}});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.num_tets(); ++i)
    for (int j = 0; j < 4; ++j) v(i, j) = m.tets[i][j];
  return a;
}

py::dict run_config(const RunConfig& cfg, std::optional<std::string> out_dir,
                    std::optional<bool> write_fields, bool verbose) {
  RunOptions opt;
  if (out_dir) opt.out_dir = *out_dir;
  opt.write_fields = write_fields;
  std::ostringstream progress;
  opt.progress = &progress;
  ConvergenceHistory h;
  {
    py::gil_scoped_release release;
    h = run(cfg, opt);
  }
  if (verbose) py::print(progress.str(), py::arg("end") = "");
  py::list records;
  for (const auto& r : h.records) records.append(record_dict(r));
  py::dict d;
  d["records"] = records;
  d["stop_reason"] = h.stop_reason;
  d["eps_pml"] = h.report.eps_pml;
  d["pml_bound"] = h.report.pml_bound;
  d["num_vertices"] = h.mesh.num_vertices();
  d["num_tets"] = h.mesh.num_tets();
  return d;
}

}  // namespace

PYBIND11_MODULE(_aefem, m) {
  m.doc() = "Adaptive P1 finite elements for acoustic-elastic scattering with a PML";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::enum_<Region>(m, "Region")
      .value("Acoustic", Region::Acoustic)
      .value("Elastic", Region::Elastic)
      .value("Pml", Region::Pml);

  py::class_<PhysicsConfig>(m, "PhysicsConfig")
      .def(py::init<>())
      .def_readwrite("kappa", &PhysicsConfig::kappa)
      .def_readwrite("omega", &PhysicsConfig::omega)
      .def_readwrite("lam", &PhysicsConfig::lambda)
      .def_readwrite("mu", &PhysicsConfig::mu)
      .def_readwrite("rho_a", &PhysicsConfig::rho_a)
      .def("validate", &PhysicsConfig::validate);

  py::class_<PmlProfile>(m, "PmlProfile")
      .def(py::init<>())
      .def_readwrite("L", &PmlProfile::L)
      .def_readwrite("d", &PmlProfile::d)
      .def_readwrite("sigma0", &PmlProfile::sigma0)
      .def_readwrite("m", &PmlProfile::m)
      .def("validate", &PmlProfile::validate)
      .def("enabled", &PmlProfile::enabled);

  py::class_<TetMesh>(m, "TetMesh")
      .def_property_readonly("num_vertices", &TetMesh::num_vertices)
      .def_property_readonly("num_tets", &TetMesh::num_tets)
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("tets", &tet_array)
      .def_property_readonly("regions", [](const TetMesh& t) { return t.region; })
      .def("total_volume", [](const TetMesh& t) { return total_volume(t); })
      .def("region_volume", [](const TetMesh& t, Region r) { return region_volume(t, r); })
      .def("min_dihedral_angle", [](const TetMesh& t) { return min_dihedral_angle(t); })
      .def("refine", [](const TetMesh& t, const std::vector<int>& marked) { return refine(t, marked); },
           py::arg("marked"));

  m.def(
      "box_mesh",
      [](std::array<double, 3> lo, std::array<double, 3> hi, double h, std::array<double, 3> b_lo,
         std::array<double, 3> b_hi, std::optional<std::array<double, 3>> e_lo,
         std::optional<std::array<double, 3>> e_hi) {
        BoxRegions regions;
        regions.acoustic_box = to_box(b_lo, b_hi);
        if (e_lo.has_value() != e_hi.has_value()) throw Error("box_mesh: give both elastic corners or neither");
        if (e_lo) regions.elastic_box = to_box(*e_lo, *e_hi);
        return generate_box_mesh(to_box(lo, hi), h, regions);
      },
      py::arg("lo"), py::arg("hi"), py::arg("h"), py::arg("acoustic_lo"), py::arg("acoustic_hi"),
      py::arg("elastic_lo") = py::none(), py::arg("elastic_hi") = py::none());

  m.def("mark", [](const std::vector<double>& etas, double tau) { return mark(etas, tau); },
        py::arg("etas"), py::arg("tau"));

  m.def("sigma_profile", &sigma_profile, py::arg("t"), py::arg("axis"), py::arg("profile"));
  m.def("gamma1", &gamma1, py::arg("profile"));
  m.def("pml_bound", py::overload_cast<const PmlProfile&, double, double>(&pml_bound),
        py::arg("profile"), py::arg("kappa"), py::arg("sigma"));

  m.def("exact_pressure",
        [](std::array<double, 3> x, double kappa, std::array<double, 3> x0) {
          return exact_pressure(to_vec(x), kappa, to_vec(x0));
        },
        py::arg("x"), py::arg("kappa"), py::arg("x0"));
  m.def("plane_wave", [](std::array<double, 3> x, double kappa) { return plane_wave(to_vec(x), kappa); },
        py::arg("x"), py::arg("kappa"));
  m.def("compatibility_defect", &compatibility_defect, py::arg("physics"));
  m.def("fit_rate",
        [](const std::vector<std::pair<double, double>>& samples) { return fit_rate(samples); },
        py::arg("samples"));

  m.def(
      "run_file",
      [](const std::string& path, std::optional<std::string> out_dir, std::optional<bool> write_fields,
         bool verbose) { return run_config(load_run_config(path), out_dir, write_fields, verbose); },
      py::arg("path"), py::arg("out_dir") = py::none(), py::arg("write_fields") = py::none(),
      py::arg("verbose") = false);
  m.def(
      "run_text",
      [](const std::string& text, std::optional<std::string> out_dir, std::optional<bool> write_fields,
         bool verbose) { return run_config(parse_run_config(text), out_dir, write_fields, verbose); },
      py::arg("text"), py::arg("out_dir") = py::none(), py::arg("write_fields") = py::none(),
      py::arg("verbose") = false);
}
