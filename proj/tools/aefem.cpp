// Command-line front end: solve, mesh-info, check.

#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "aefem/run.hpp"
#include "aefem/scenarios.hpp"

namespace {

int cmd_solve(const std::string& config_path, const std::string& out_dir, bool write_fields) {
  const aefem::RunConfig config = aefem::load_run_config(config_path);
  aefem::RunOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (write_fields) options.write_fields = true;
  options.progress = &std::cout;
  const auto history = aefem::run(config, options);
  std::cout << "stopped: " << history.stop_reason << " after " << history.records.size() << " solve(s)\n";
  return 0;
}

int cmd_mesh_info(const std::string& config_path) {
  using namespace aefem;
  const RunConfig config = load_run_config(config_path);
  const TetMesh mesh = build_initial_mesh(config);
  const DofMap dofs = build_dof_map(mesh);
  std::cout << "vertices " << mesh.num_vertices() << "\ntets " << mesh.num_tets() << "\nfaces "
            << mesh.faces.size() << "\nN_p " << dofs.num_p << "\nN_u " << dofs.u_count() << "\nunknowns "
            << dofs.size() << '\n';
  for (Region r : {Region::Elastic, Region::Acoustic, Region::Pml}) {
    std::cout << "volume " << to_string(r) << ' ' << region_volume(mesh, r) << '\n';
  }
  for (FaceTag t : {FaceTag::InterfaceGammaS, FaceTag::PmlInnerBoundaryB, FaceTag::OuterGamma}) {
    std::cout << "faces " << to_string(t) << ' ' << count_faces(mesh, t) << '\n';
  }
  std::cout << "min dihedral angle (deg) " << min_dihedral_angle(mesh) * 180.0 / 3.14159265358979323846 << '\n';
  return 0;
}

int cmd_check(const std::string& config_path) {
  using namespace aefem;
  const RunConfig config = load_run_config(config_path);
  std::cout << std::setprecision(10);
  const double defect = compatibility_defect(config.physics);
  std::cout << "compatibility defect kappa^2 (lambda + 2 mu) - omega^2 = " << defect << '\n';
  bool ok = true;
  if (config.mode == ScenarioMode::ManufacturedDirichlet) {
    try {
      verify_compatibility(config.physics);
      std::cout << "compatibility: ok\n";
    } catch (const Error& e) {
      std::cout << "compatibility: FAILED (" << e.what() << ")\n";
      ok = false;
    }
  }
  if (config.pml.enabled()) {
    const double bound = pml_bound(config.pml, config.physics.kappa);
    std::cout << "gamma1 = " << gamma1(config.pml) << "\nalpha0 = " << pml_alpha0(config.pml)
              << "\npml bound = " << bound << '\n';
    std::cout << "pml bound below 1e-8: " << (pml_bound_within(bound) ? "yes" : "no (diagnostic only)") << '\n';
  } else {
    std::cout << "pml: disabled\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive P1 finite elements for acoustic-elastic scattering"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool write_fields = false;
  auto* solve = app.add_subcommand("solve", "Run the adaptive loop and write results");
  solve->add_option("--config", config_path, "JSON run configuration")->required();
  solve->add_option("--out", out_dir, "Output directory (overrides the config)");
  solve->add_flag("--write-fields", write_fields, "Write fields_####.vtk for every iteration");

  auto* info = app.add_subcommand("mesh-info", "Print mesh counts, region volumes and tags");
  info->add_option("--config", config_path, "JSON run configuration")->required();

  auto* check = app.add_subcommand("check", "Check parameter compatibility and the PML bound");
  check->add_option("--config", config_path, "JSON run configuration")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(config_path, out_dir, write_fields);
    if (*info) return cmd_mesh_info(config_path);
    if (*check) return cmd_check(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
