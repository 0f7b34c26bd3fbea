#pragma once

#include "aefem/assembly.hpp"

namespace aefem {

enum class SolverKind { Direct, Iterative };

struct SolveOptions {
  double tolerance = 1e-10;
  SolverKind kind = SolverKind::Direct;
  int max_iterations = 5000;  // iterative path only
  int restart = 100;
};

struct FactorizationStats {
  double nnz_matrix = 0.0;
  double nnz_factors = 0.0;   // L + U entries (direct) or preconditioner entries
  double peak_memory_mb = 0.0;
};

struct SolveReport {
  Eigen::VectorXcd solution;
  double relative_residual = 0.0;
  int iterations = 0;  // 0 for the direct path
  FactorizationStats stats;
};

/// Solves the constrained system to ||M x - rhs|| / ||rhs|| <= tol.
/// The direct path (sparse LU with a fill-reducing ordering) is deterministic.
SolveReport solve(const ComplexSparseSystem& system, const SolveOptions& options = {});
inline SolveReport solve(const ComplexSparseSystem& system, double tol) {
  SolveOptions o;
  o.tolerance = tol;
  return solve(system, o);
}

double relative_residual(const Eigen::SparseMatrix<Complex>& matrix, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& rhs);

}  // namespace aefem
