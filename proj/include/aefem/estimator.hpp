#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aefem/assembly.hpp"

namespace aefem {

/// Residual estimator of one discrete solution.
///
/// H^{1/2} norms are replaced by computable surrogates: on the outer boundary Gamma,
/// ||v||^2 ~ sum_e (h_e^{-1} ||v||^2_{L2(e)} + |v|^2_{H1(e)}); on the PML inner boundary the
/// L2 norm is used.
struct EstimatorReport {
  std::vector<double> eta;      // eta_K
  std::vector<double> eta_hat;  // eta_K + local boundary interpolation surrogate
  double eta_p_total = 0.0;     // acoustic and PML tets
  double eta_u_total = 0.0;     // elastic tets
  double eta_total = 0.0;
  double boundary_interp_term = 0.0;
  double eps_fem = 0.0;
  double eps_pml = 0.0;
  double pml_bound = 0.0;
  double pml_trace_norm = 0.0;  // ||p_h - p_inc||_{L2(dB)}
};

/// ||h_K R_K||_{L2(K)}.
double element_residual(const TetMesh& mesh, std::size_t tet, const FieldPair& fields,
                        const PhysicsConfig& physics, const PmlProfile& profile,
                        const Scenario& scenario);

/// ||J_e||_{L2(e)} for an interior face off Gamma_s.
double face_jump_interior(const TetMesh& mesh, const Face& face, const FieldPair& fields,
                          const PhysicsConfig& physics, const PmlProfile& profile);

/// L2 norms of the kinematic (acoustic side) and traction (elastic side) defects on a
/// Gamma_s face, with the scenario's interface data subtracted in manufactured mode.
struct InterfaceJumps {
  double kinematic = 0.0;
  double traction = 0.0;
};
InterfaceJumps face_jump_interface(const TetMesh& mesh, const Face& face, const FieldPair& fields,
                                   const PhysicsConfig& physics, const Scenario& scenario);

struct FaceContribution {
  double h_e = 0.0;
  double jump_norm = 0.0;
  bool on_interface = false;
};

/// (res^2 + 1/2 sum_{off Gamma_s} h_e J^2 + sum_{on Gamma_s} h_e J^2)^{1/2}
double eta_local(double residual_norm, std::span<const FaceContribution> faces);

/// Squared surrogate h_e^{-1} ||v||^2_{L2(e)} + |v|^2_{H1(e)} of v = data - I_h data on a face.
double boundary_interpolation_squared(const TetMesh& mesh, const Face& face,
                                      const std::function<Complex(const Vec3&)>& data,
                                      const std::function<CVec3(const Vec3&)>& data_gradient);

/// `pml_sigma` defaults to the profile's sigma0.
EstimatorReport global_report(const TetMesh& mesh, const FieldPair& fields,
                              const PhysicsConfig& physics, const PmlProfile& profile,
                              const Scenario& scenario, std::optional<double> pml_sigma = {});

}  // namespace aefem
