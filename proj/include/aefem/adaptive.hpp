#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aefem/estimator.hpp"
#include "aefem/solver.hpp"

namespace aefem {

struct AdaptiveConfig {
  double epsilon = 1e-3;
  double tau = 0.5;
  int max_iterations = 10;
  long max_dofs = 200000;  // no refinement once the system has this many unknowns
  SolveOptions solver;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  int n_p = 0;
  int n_u = 0;  // displacement unknowns
  double eta_p = 0.0;
  double eta_u = 0.0;
  double eta_total = 0.0;
  double eps_fem = 0.0;
  double eps_pml = 0.0;
  std::optional<double> err_p;
  std::optional<double> err_u;
  double relative_residual = 0.0;
  double seconds = 0.0;
};

struct ConvergenceHistory {
  std::vector<IterationRecord> records;
  TetMesh mesh;
  FieldPair fields;
  EstimatorReport report;
  std::string stop_reason;
};

/// Greedy bulk marking: the smallest set S, taken in descending order of eta (ties by
/// lower index), with sum_S eta^2 > tau^2 sum eta^2.
std::vector<int> mark(std::span<const double> etas, double tau);

/// Called after each estimate with the current mesh and fields.
using IterationObserver =
    std::function<void(const IterationRecord&, const TetMesh&, const FieldPair&)>;

/// solve -> estimate -> stop if eps_FEM <= epsilon or a budget is hit -> mark -> refine.
/// Throws on solver or marking failure; `partial` (when given) then holds the records
/// completed so far.
ConvergenceHistory run_afem(const TetMesh& mesh0, const PhysicsConfig& physics,
                            const PmlProfile& profile, const Scenario& scenario,
                            const AdaptiveConfig& config, const IterationObserver& observer = {},
                            std::ostream* progress = nullptr,
                            ConvergenceHistory* partial = nullptr);

/// Single discrete solve on a fixed mesh (Dirichlet data from scenario.pressure on Gamma).
struct DiscreteSolution {
  DofMap dofs;
  FieldPair fields;
  SolveReport solve;
};
DiscreteSolution solve_on_mesh(const TetMesh& mesh, const PhysicsConfig& physics,
                               const PmlProfile& profile, const Scenario& scenario,
                               const SolveOptions& options = {});

}  // namespace aefem
