#include "aefem/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "aefem/scenarios.hpp"

namespace aefem {

void AdaptiveConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw Error("tau must lie in (0, 1)");
  if (max_iterations < 0) throw Error("max_iterations must be nonnegative");
  if (max_dofs <= 0) throw Error("max_dofs must be positive");
  if (!(solver.tolerance > 0.0 && solver.tolerance < 1.0)) throw Error("solver tolerance must lie in (0, 1)");
}

std::vector<int> mark(std::span<const double> etas, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error("mark: tau must lie in (0, 1)");
  double total = 0.0;
  for (double e : etas) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw Error("mark: indicators must be finite and nonnegative");
    total += e * e;
  }
  if (!(total > 0.0)) throw Error("mark: all indicators vanish, nothing to refine");

  std::vector<int> order(etas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return etas[a] > etas[b]; });
  const double threshold = tau * tau * total;
  std::vector<int> marked;
  double acc = 0.0;
  for (int k : order) {
    marked.push_back(k);
    acc += etas[k] * etas[k];
    if (acc > threshold) break;
  }
  return marked;
}

DiscreteSolution solve_on_mesh(const TetMesh& mesh, const PhysicsConfig& physics,
                               const PmlProfile& profile, const Scenario& scenario,
                               const SolveOptions& options) {
  DiscreteSolution out;
  out.dofs = build_dof_map(mesh);
  ComplexSparseSystem system = assemble(mesh, out.dofs, physics, profile, scenario);
  system = apply_dirichlet(std::move(system), mesh, out.dofs, FaceTag::OuterGamma, scenario.pressure);
  out.solve = solve(system, options);
  out.fields = extract_fields(out.dofs, out.solve.solution);
  return out;
}

ConvergenceHistory run_afem(const TetMesh& mesh0, const PhysicsConfig& physics,
                            const PmlProfile& profile, const Scenario& scenario,
                            const AdaptiveConfig& config, const IterationObserver& observer,
                            std::ostream* progress, ConvergenceHistory* partial) {
  config.validate();
  physics.validate();
  profile.validate();
  ConvergenceHistory history;
  TetMesh mesh = mesh0;
  for (int iter = 0;; ++iter) {
    const auto start = std::chrono::steady_clock::now();
    DiscreteSolution sol;
    EstimatorReport rep;
    try {
      sol = solve_on_mesh(mesh, physics, profile, scenario, config.solver);
      rep = global_report(mesh, sol.fields, physics, profile, scenario);
    } catch (...) {
      if (partial) *partial = history;
      throw;
    }

    IterationRecord r;
    r.iter = iter;
    r.n_p = sol.dofs.num_p;
    r.n_u = sol.dofs.u_count();
    r.eta_p = rep.eta_p_total;
    r.eta_u = rep.eta_u_total;
    r.eta_total = rep.eta_total;
    r.eps_fem = rep.eps_fem;
    r.eps_pml = rep.eps_pml;
    r.relative_residual = sol.solve.relative_residual;
    if (scenario.has_exact_solution()) {
      const H1Errors e = h1_errors(mesh, sol.fields, scenario);
      r.err_p = e.p;
      r.err_u = e.u;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    history.records.push_back(r);
    if (observer) observer(r, mesh, sol.fields);
    if (progress) {
      *progress << "iter " << iter << "  N_p " << r.n_p << "  N_u " << r.n_u << "  eta " << r.eta_total
                << "  eps_fem " << r.eps_fem << "  eps_pml " << r.eps_pml;
      if (r.err_p) *progress << "  err_p " << *r.err_p << "  err_u " << *r.err_u;
      *progress << "  (" << r.seconds << " s)\n" << std::flush;
    }

    std::string stop;
    if (rep.eps_fem <= config.epsilon) {
      stop = "tolerance reached";
    } else if (iter >= config.max_iterations) {
      stop = "iteration budget reached";
    } else if (sol.dofs.size() >= config.max_dofs) {
      stop = "dof budget reached";
    }
    if (!stop.empty()) {
      history.stop_reason = stop;
      history.fields = std::move(sol.fields);
      history.report = std::move(rep);
      history.mesh = std::move(mesh);
      return history;
    }

    try {
      const std::vector<int> marked = mark(rep.eta_hat, config.tau);
      mesh = refine(mesh, marked);
    } catch (...) {
      if (partial) *partial = history;
      throw;
    }
  }
}

}  // namespace aefem
