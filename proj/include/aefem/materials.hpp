#pragma once

#include <array>

#include "aefem/common.hpp"

namespace aefem {

/// Wavenumber, angular frequency, Lamé parameters and fluid density.
struct PhysicsConfig {
  double kappa = 1.0;
  double omega = 1.0;
  double lambda = 0.5;
  double mu = 0.25;
  double rho_a = 1.0;

  /// Throws Error unless every parameter is strictly positive.
  void validate() const;
};

/// Power-law PML profile on the layer B < |x_j| < L_j + d_j.
/// Axes are 0-based. sigma0 == 0 disables the layer.
struct PmlProfile {
  std::array<double, 3> L{0.6, 0.6, 0.6};
  std::array<double, 3> d{0.4, 0.4, 0.4};
  double sigma0 = 0.0;
  int m = 2;

  void validate() const;
  bool enabled() const { return sigma0 > 0.0; }
};

/// sigma_j(t) = sigma0 ((|t| - L_j)/d_j)^m for |t| >= L_j, else 0.
double sigma_profile(double t, int axis, const PmlProfile& profile);

/// d sigma_j / dt, one-sided at |t| = L_j when m == 1.
double sigma_derivative(double t, int axis, const PmlProfile& profile);

/// Diagonal of A = diag(a2 a3/a1, a1 a3/a2, a1 a2/a3) and b = a1 a2 a3 with
/// a_j = 1 + i sigma_j(x_j).
struct PmlCoefficients {
  CVec3 A_diag;
  Complex b;
};

PmlCoefficients pml_coefficients(const Vec3& x, const PmlProfile& profile);

/// Component j is d A_jj / d x_j, the only derivatives of A that survive in
/// div(A grad p) for piecewise linear p.
CVec3 pml_coefficient_derivatives(const Vec3& x, const PmlProfile& profile);

/// min_j d_j / (sum_j (2 L_j + d_j)^2)^{1/2}
double gamma1(const PmlProfile& profile);

/// max over the outer boundary of |1 + i sigma_j| = (1 + sigma0^2)^{1/2}.
double pml_alpha0(const PmlProfile& profile);

/// alpha0^3 (1 + kappa L)^3 exp(-gamma1 kappa sigma), L = max_j L_j.
double pml_bound(const PmlProfile& profile, double kappa, double sigma);
inline double pml_bound(const PmlProfile& profile, double kappa) {
  return pml_bound(profile, kappa, profile.sigma0);
}

inline bool pml_bound_within(double bound, double budget = 1e-8) { return bound < budget; }

/// Hooke law sigma(u) = 2 mu eps(u) + lambda tr(eps(u)) I with eps = (G + G^T)/2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> stress(const Eigen::MatrixBase<Derived>& grad_u,
                                                      double lambda, double mu) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, 3, 3> eps = 0.5 * (grad_u + grad_u.transpose());
  Eigen::Matrix<Scalar, 3, 3> s = (2.0 * mu) * eps;
  s.diagonal().array() += lambda * eps.trace();
  return s;
}

}  // namespace aefem
