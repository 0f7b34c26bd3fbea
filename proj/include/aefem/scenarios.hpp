#pragma once

#include <span>
#include <utility>

#include "aefem/assembly.hpp"

namespace aefem {

/// Point source p(x) = exp(i kappa r)/r, r = |x - x0|, and u = omega^2 grad p.
Complex exact_pressure(const Vec3& x, double kappa, const Vec3& x0);
CVec3 exact_gradient(const Vec3& x, double kappa, const Vec3& x0);
CMat3 exact_hessian(const Vec3& x, double kappa, const Vec3& x0);

/// Manufactured pair for the coupled problem. Requires kappa^2 (lambda + 2 mu) = omega^2.
class ManufacturedSolution {
 public:
  ManufacturedSolution(const PhysicsConfig& physics, const Vec3& x0);

  Complex pressure(const Vec3& x) const { return exact_pressure(x, physics_.kappa, x0_); }
  CVec3 pressure_gradient(const Vec3& x) const { return exact_gradient(x, physics_.kappa, x0_); }
  CMat3 pressure_hessian(const Vec3& x) const { return exact_hessian(x, physics_.kappa, x0_); }
  CVec3 displacement(const Vec3& x) const { return omega2() * pressure_gradient(x); }
  CMat3 displacement_gradient(const Vec3& x) const { return omega2() * pressure_hessian(x); }

  const Vec3& source() const { return x0_; }
  const PhysicsConfig& physics() const { return physics_; }

 private:
  double omega2() const { return physics_.omega * physics_.omega; }

  PhysicsConfig physics_;
  Vec3 x0_;
};

/// Defect kappa^2 (lambda + 2 mu) - omega^2.
double compatibility_defect(const PhysicsConfig& physics);

/// Throws Error naming the defect when |defect| > 1e-12.
void verify_compatibility(const PhysicsConfig& physics);

/// Interface data of an exact pair at x on Gamma_s with normal n1:
/// g_N = n1 . grad p - rho_a omega^2 n1 . u and g_T = -p n1 - sigma(u) n1.
struct InterfaceData {
  Complex normal;
  CVec3 traction;
};
InterfaceData interface_data(const Vec3& x, const Vec3& n1, const ManufacturedSolution& solution);

/// exp(-i kappa x_3)
Complex plane_wave(const Vec3& x, double kappa);

Scenario make_manufactured_scenario(const PhysicsConfig& physics, const Vec3& x0);
Scenario make_plane_wave_scenario(const PhysicsConfig& physics);

/// H1 norms of p - p_h over acoustic tets and u - u_h over elastic tets (degree-4 rule).
struct H1Errors {
  double p = 0.0;
  double u = 0.0;
};
H1Errors h1_errors(const TetMesh& mesh, const FieldPair& fields, const Scenario& scenario);

/// Least-squares slope of log(err) against log(n).
double fit_rate(std::span<const std::pair<double, double>> samples);

}  // namespace aefem
