#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Sparse>

#include "aefem/common.hpp"
#include "aefem/materials.hpp"
#include "aefem/mesh.hpp"

namespace aefem {

enum class ScenarioMode { ManufacturedDirichlet, PlaneWavePml };

/// Data of one experiment.
///
/// `pressure` (with gradient and Hessian) is the exact total pressure in manufactured
/// mode and the incident wave in plane-wave mode; it also supplies the Dirichlet data on
/// the outer boundary. Displacement and interface data are only set in manufactured mode.
struct Scenario {
  ScenarioMode mode = ScenarioMode::PlaneWavePml;
  std::function<Complex(const Vec3&)> pressure;
  std::function<CVec3(const Vec3&)> pressure_gradient;
  std::function<CMat3(const Vec3&)> pressure_hessian;
  std::function<CVec3(const Vec3&)> displacement;
  std::function<CMat3(const Vec3&)> displacement_gradient;
  /// g_N(x, n1) = n1 . grad p - rho_a omega^2 n1 . u
  std::function<Complex(const Vec3&, const Vec3&)> interface_normal_data;
  /// g_T(x, n1) = -p n1 - sigma(u) n1
  std::function<CVec3(const Vec3&, const Vec3&)> interface_traction_data;

  bool has_exact_solution() const { return mode == ScenarioMode::ManufacturedDirichlet; }
};

/// P1 degrees of freedom: one pressure unknown per vertex of an acoustic or PML tet,
/// three displacement unknowns per vertex of an elastic tet. Pressure dofs come first,
/// then displacement dofs grouped by vertex then component, both in vertex order.
struct DofMap {
  std::vector<int> p_dof;  // -1 where the vertex carries no pressure
  std::vector<int> u_dof;  // first of three consecutive dofs, or -1
  int num_p = 0;
  int num_u = 0;  // number of displacement vertices (3 * num_u unknowns)

  int size() const { return num_p + 3 * num_u; }
  int u_count() const { return 3 * num_u; }  // N_u as reported in convergence tables
};

/// `require_coupled` rejects meshes lacking an elastic or an acoustic/PML region.
DofMap build_dof_map(const TetMesh& mesh, bool require_coupled = false);

/// Nodal pressure and displacement, indexed by vertex (zero where undefined).
struct FieldPair {
  std::vector<Complex> p;
  std::vector<CVec3> u;
};

FieldPair extract_fields(const DofMap& dofs, const Eigen::VectorXcd& solution);

/// Nodal interpolant of the scenario's exact fields (manufactured mode).
FieldPair interpolate_exact(const TetMesh& mesh, const DofMap& dofs, const Scenario& scenario);

/// Sparse complex system in DofMap ordering; `constrained` holds Dirichlet values.
struct ComplexSparseSystem {
  Eigen::SparseMatrix<Complex> matrix;
  Eigen::VectorXcd rhs;
  std::map<int, Complex> constrained;
};

using AcousticMatrix = Eigen::Matrix<Complex, 4, 4>;
using ElasticMatrix = Eigen::Matrix<Complex, 12, 12>;
using CouplingPU = Eigen::Matrix<Complex, 3, 9>;
using CouplingUP = Eigen::Matrix<Complex, 9, 3>;

/// Volume rule used for acoustic/PML elements: 2 in constant-coefficient regions, 4 in
/// the PML.
int acoustic_quadrature_degree(Region region, const PmlProfile& profile);

/// M_ij = int_K (A grad phi_j . grad phi_i - kappa^2 b phi_j phi_i).
/// `degree` 0 selects acoustic_quadrature_degree().
AcousticMatrix element_acoustic(const TetVertices& v, Region region, const PhysicsConfig& physics,
                                const PmlProfile& profile, int degree = 0);

/// Stiffness of sigma(u) : grad v minus omega^2 times the vector mass; local dof 3 i + c
/// is component c at vertex i.
ElasticMatrix element_elastic(const TetVertices& v, const PhysicsConfig& physics);
ElasticMatrix element_elastic_stiffness(const TetVertices& v, double lambda, double mu);

/// Interface face blocks:
///   C_pu(i, 3 j + c) = rho_a omega^2 int_e n1_c phi_j phi_i,
///   C_up(3 i + c, j) = int_e n1_c phi_j phi_i.
struct CouplingBlocks {
  CouplingPU pu;
  CouplingUP up;
};
CouplingBlocks coupling_face(const std::array<Vec3, 3>& v, const Vec3& n1,
                             const PhysicsConfig& physics);
CouplingBlocks coupling_face(const TetMesh& mesh, const Face& face, const PhysicsConfig& physics);

/// Source g = L p_inc = div(A grad p_inc) + kappa^2 b p_inc in the PML, 0 elsewhere.
Complex evaluate_g(const Vec3& x, Region region, const Scenario& scenario,
                   const PhysicsConfig& physics, const PmlProfile& profile);

/// Global matrix and right-hand side, without Dirichlet constraints.
/// The right-hand side is -int g q in plane-wave mode and -int_{Gamma_s} (g_N q + g_T . v)
/// in manufactured mode.
ComplexSparseSystem assemble(const TetMesh& mesh, const DofMap& dofs, const PhysicsConfig& physics,
                             const PmlProfile& profile, const Scenario& scenario);

/// Pressure dofs on faces with `tag` become identity rows with value_fn(vertex) on the
/// right-hand side; their columns are eliminated into the right-hand side.
ComplexSparseSystem apply_dirichlet(ComplexSparseSystem system, const TetMesh& mesh,
                                    const DofMap& dofs, FaceTag tag,
                                    const std::function<Complex(const Vec3&)>& value_fn);

}  // namespace aefem
