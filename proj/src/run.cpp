#include "aefem/run.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "aefem/vtk.hpp"

namespace aefem {

namespace {

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string mode_name(ScenarioMode m) {
  return m == ScenarioMode::ManufacturedDirichlet ? "manufactured" : "plane_wave";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

void write_convergence_csv(std::ostream& out, std::span<const IterationRecord> records) {
  out << "iter,N_p,N_u,eta_p,eta_u,eps_fem,eps_pml,err_p,err_u,seconds\n";
  for (const auto& r : records) {
    out << r.iter << ',' << r.n_p << ',' << r.n_u << ',' << number(r.eta_p) << ',' << number(r.eta_u) << ','
        << number(r.eps_fem) << ',' << number(r.eps_pml) << ',' << (r.err_p ? number(*r.err_p) : "") << ','
        << (r.err_u ? number(*r.err_u) : "") << ',' << number(r.seconds) << '\n';
  }
}

std::string report_json(const RunConfig& config, const ConvergenceHistory& history) {
  using nlohmann::json;
  const EstimatorReport& rep = history.report;
  json j;
  j["scenario"] = mode_name(config.mode);
  j["iterations"] = history.records.size();
  j["stop_reason"] = history.stop_reason;
  if (!history.records.empty()) {
    const auto& last = history.records.back();
    j["N_p"] = last.n_p;
    j["N_u"] = last.n_u;
    j["relative_residual"] = last.relative_residual;
    if (last.err_p) {
      j["err_p"] = *last.err_p;
      j["err_u"] = *last.err_u;
    }
  }
  j["num_vertices"] = history.mesh.num_vertices();
  j["num_tets"] = history.mesh.num_tets();
  j["estimator"] = {{"eta_p_total", rep.eta_p_total},
                    {"eta_u_total", rep.eta_u_total},
                    {"eta_total", rep.eta_total},
                    {"boundary_interp_term", rep.boundary_interp_term},
                    {"eps_fem", rep.eps_fem},
                    {"eps_pml", rep.eps_pml}};
  json pml = {{"enabled", config.pml.enabled()}};
  if (config.pml.enabled()) {
    pml["sigma0"] = config.pml.sigma0;
    pml["m"] = config.pml.m;
    pml["L"] = config.pml.L;
    pml["d"] = config.pml.d;
    pml["gamma1"] = gamma1(config.pml);
    pml["alpha0"] = pml_alpha0(config.pml);
    pml["bound"] = rep.pml_bound;
    pml["bound_below_1e-8"] = pml_bound_within(rep.pml_bound);
    pml["trace_norm"] = rep.pml_trace_norm;
  }
  j["pml"] = pml;
  j["norms"] = {{"boundary_interp_term", "sum over Gamma faces of h_e^-1 ||v||^2_L2(e) + |v|^2_H1(e), square-rooted"},
                {"pml_trace_norm", "L2(dB)"}};
  return j.dump(2) + "\n";
}

ConvergenceHistory run(const RunConfig& config, const RunOptions& options) {
  const std::filesystem::path dir = options.out_dir.value_or(config.output.directory);
  const bool write_fields = options.write_fields.value_or(config.output.write_fields);
  std::filesystem::create_directories(dir);

  const TetMesh mesh = build_initial_mesh(config);
  const Scenario scenario = make_scenario(config);
  IterationObserver observer;
  if (write_fields) {
    observer = [&](const IterationRecord& r, const TetMesh& m, const FieldPair& f) {
      char name[32];
      std::snprintf(name, sizeof name, "fields_%04d.vtk", r.iter);
      std::ofstream out(dir / name);
      write_vtk(out, m, f, "iteration " + std::to_string(r.iter));
    };
  }

  ConvergenceHistory partial;
  ConvergenceHistory history;
  try {
    history = run_afem(mesh, config.physics, config.pml, scenario, config.adaptive, observer,
                       options.progress, &partial);
  } catch (...) {
    std::ofstream csv(dir / "convergence.csv");
    write_convergence_csv(csv, partial.records);
    throw;
  }
  std::ostringstream csv;
  write_convergence_csv(csv, history.records);
  write_file(dir / "convergence.csv", csv.str());
  write_file(dir / "report.json", report_json(config, history));
  return history;
}

}  // namespace aefem
