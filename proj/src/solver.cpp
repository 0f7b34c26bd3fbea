#include "aefem/solver.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include <umfpack.h>

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

namespace aefem {

double relative_residual(const Eigen::SparseMatrix<Complex>& matrix, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& rhs) {
  const double nb = rhs.norm();
  const double nr = (matrix * x - rhs).norm();
  return nb > 0.0 ? nr / nb : nr;
}

namespace {

struct UmfpackSymbolic {
  void* handle = nullptr;
  ~UmfpackSymbolic() {
    if (handle) umfpack_zi_free_symbolic(&handle);
  }
};

struct UmfpackNumeric {
  void* handle = nullptr;
  ~UmfpackNumeric() {
    if (handle) umfpack_zi_free_numeric(&handle);
  }
};

// Packed complex storage: std::complex<double> arrays are interleaved (re, im) pairs.
const double* packed(const Complex* p) { return reinterpret_cast<const double*>(p); }
double* packed(Complex* p) { return reinterpret_cast<double*>(p); }

SolveReport solve_direct(const Eigen::SparseMatrix<Complex>& A, const Eigen::VectorXcd& rhs,
                         double tol) {
  const int n = static_cast<int>(A.rows());
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  control[UMFPACK_IRSTEP] = 4;

  const int* Ap = A.outerIndexPtr();
  const int* Ai = A.innerIndexPtr();
  const double* Ax = packed(A.valuePtr());

  UmfpackSymbolic symbolic;
  int status = umfpack_zi_symbolic(n, n, Ap, Ai, Ax, nullptr, &symbolic.handle, control, info);
  if (status != UMFPACK_OK) {
    throw Error("solve: symbolic factorization failed (UMFPACK status " + std::to_string(status) + ")");
  }
  UmfpackNumeric numeric;
  status = umfpack_zi_numeric(Ap, Ai, Ax, nullptr, symbolic.handle, &numeric.handle, control, info);
  if (status == UMFPACK_WARNING_singular_matrix) {
    throw Error("solve: matrix is singular (rcond " + std::to_string(info[UMFPACK_RCOND]) + ")");
  }
  if (status != UMFPACK_OK) {
    throw Error("solve: numeric factorization failed (UMFPACK status " + std::to_string(status) + ")");
  }

  SolveReport report;
  report.stats.nnz_matrix = static_cast<double>(A.nonZeros());
  report.stats.nnz_factors = info[UMFPACK_LNZ] + info[UMFPACK_UNZ];
  report.stats.peak_memory_mb = info[UMFPACK_PEAK_MEMORY] * info[UMFPACK_SIZE_OF_UNIT] / (1024.0 * 1024.0);

  report.solution = Eigen::VectorXcd::Zero(n);
  status = umfpack_zi_solve(UMFPACK_A, Ap, Ai, Ax, nullptr, packed(report.solution.data()), nullptr,
                            packed(rhs.data()), nullptr, numeric.handle, control, info);
  if (status != UMFPACK_OK) {
    throw Error("solve: triangular solve failed (UMFPACK status " + std::to_string(status) + ")");
  }
  report.relative_residual = relative_residual(A, report.solution, rhs);
  if (!(report.relative_residual <= tol)) {
    std::ostringstream os;
    os << "solve: direct solve residual " << report.relative_residual << " exceeds tolerance " << tol;
    throw Error(os.str());
  }
  return report;
}

SolveReport solve_iterative(const Eigen::SparseMatrix<Complex>& A, const Eigen::VectorXcd& rhs,
                            const SolveOptions& options) {
  Eigen::GMRES<Eigen::SparseMatrix<Complex>, Eigen::IncompleteLUT<Complex>> gmres;
  gmres.preconditioner().setDroptol(1e-4);
  gmres.preconditioner().setFillfactor(20);
  gmres.set_restart(options.restart);
  gmres.setMaxIterations(options.max_iterations);
  gmres.setTolerance(options.tolerance * 0.5);
  gmres.compute(A);
  if (gmres.info() != Eigen::Success) throw Error("solve: incomplete factorization failed");

  SolveReport report;
  report.solution = gmres.solve(rhs);
  report.iterations = static_cast<int>(gmres.iterations());
  report.relative_residual = relative_residual(A, report.solution, rhs);
  report.stats.nnz_matrix = static_cast<double>(A.nonZeros());
  if (!(report.relative_residual <= options.tolerance)) {
    std::ostringstream os;
    os << "solve: GMRES did not converge in " << report.iterations
       << " iterations; best relative residual " << report.relative_residual;
    throw Error(os.str());
  }
  return report;
}

}  // namespace

SolveReport solve(const ComplexSparseSystem& system, const SolveOptions& options) {
  const auto& A = system.matrix;
  if (A.rows() != A.cols()) throw Error("solve: matrix is not square");
  if (A.rows() != system.rhs.size()) throw Error("solve: right-hand side size mismatch");
  if (!(options.tolerance > 0.0 && options.tolerance < 1.0)) {
    throw Error("solve: tolerance must lie in (0, 1)");
  }
  for (int k = 0; k < A.nonZeros(); ++k) {
    const Complex v = A.valuePtr()[k];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("solve: non-finite matrix entry");
  }
  if (!system.rhs.allFinite()) throw Error("solve: non-finite right-hand side");

  Eigen::SparseMatrix<Complex> compressed = A;
  compressed.makeCompressed();
  if (compressed.rows() == 0) return {};
  if (system.rhs.norm() == 0.0) {
    SolveReport zero;
    zero.solution = Eigen::VectorXcd::Zero(compressed.rows());
    return zero;
  }
  SolveReport report = options.kind == SolverKind::Direct
                           ? solve_direct(compressed, system.rhs, options.tolerance)
                           : solve_iterative(compressed, system.rhs, options);
  // Constrained rows are identity rows; pin them exactly to their prescribed values.
  for (const auto& [dof, value] : system.constrained) report.solution[dof] = value;
  report.relative_residual = relative_residual(compressed, report.solution, system.rhs);
  return report;
}

}  // namespace aefem
