#include "aefem/materials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aefem {

void PhysicsConfig::validate() const {
  const auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(std::string("physics: ") + name + " must be positive and finite");
    }
  };
  check(kappa, "kappa");
  check(omega, "omega");
  check(lambda, "lambda");
  check(mu, "mu");
  check(rho_a, "rho_a");
}

void PmlProfile::validate() const {
  for (int j = 0; j < 3; ++j) {
    if (!(L[j] > 0.0)) throw Error("pml: L must be positive");
    if (!(d[j] > 0.0)) throw Error("pml: d must be positive");
  }
  if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) throw Error("pml: sigma0 must be >= 0");
  if (m < 1) throw Error("pml: m must be an integer >= 1");
}

namespace {

// Normalised depth into the layer, (|t| - L)/d, rejecting points outside D.
double layer_depth(double t, int axis, const PmlProfile& p) {
  if (axis < 0 || axis > 2) throw Error("sigma_profile: axis must be 0, 1 or 2");
  const double a = std::abs(t);
  const double outer = p.L[axis] + p.d[axis];
  if (a > outer * (1.0 + 1e-12)) {
    throw Error("sigma_profile: |t| = " + std::to_string(a) + " lies outside the layer");
  }
  return a < p.L[axis] ? 0.0 : std::min(1.0, (a - p.L[axis]) / p.d[axis]);
}

}  // namespace

double sigma_profile(double t, int axis, const PmlProfile& profile) {
  const double s = layer_depth(t, axis, profile);
  if (s <= 0.0) return 0.0;
  return profile.sigma0 * std::pow(s, profile.m);
}

double sigma_derivative(double t, int axis, const PmlProfile& profile) {
  const double s = layer_depth(t, axis, profile);
  if (std::abs(t) < profile.L[axis]) return 0.0;
  const double mag = profile.sigma0 * profile.m * std::pow(s, profile.m - 1) / profile.d[axis];
  return t < 0.0 ? -mag : mag;
}

PmlCoefficients pml_coefficients(const Vec3& x, const PmlProfile& profile) {
  if (!profile.enabled()) return {CVec3::Ones(), Complex(1.0)};
  std::array<Complex, 3> a;
  for (int j = 0; j < 3; ++j) a[j] = Complex(1.0, sigma_profile(x[j], j, profile));
  PmlCoefficients c;
  c.A_diag << a[1] * a[2] / a[0], a[0] * a[2] / a[1], a[0] * a[1] / a[2];
  c.b = a[0] * a[1] * a[2];
  return c;
}

CVec3 pml_coefficient_derivatives(const Vec3& x, const PmlProfile& profile) {
  if (!profile.enabled()) return CVec3::Zero();
  std::array<Complex, 3> a;
  for (int j = 0; j < 3; ++j) a[j] = Complex(1.0, sigma_profile(x[j], j, profile));
  CVec3 dA;
  for (int j = 0; j < 3; ++j) {
    const Complex da = kI * sigma_derivative(x[j], j, profile);
    const Complex others = a[(j + 1) % 3] * a[(j + 2) % 3];
    dA[j] = -others * da / (a[j] * a[j]);
  }
  return dA;
}

double gamma1(const PmlProfile& profile) {
  const double dmin = *std::min_element(profile.d.begin(), profile.d.end());
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double w = 2.0 * profile.L[j] + profile.d[j];
    sum += w * w;
  }
  return dmin / std::sqrt(sum);
}

double pml_alpha0(const PmlProfile& profile) {
  return std::sqrt(1.0 + profile.sigma0 * profile.sigma0);
}

double pml_bound(const PmlProfile& profile, double kappa, double sigma) {
  if (sigma < 0.0) throw Error("pml_bound: sigma must be >= 0");
  const double L = *std::max_element(profile.L.begin(), profile.L.end());
  const double a0 = pml_alpha0(profile);
  return std::pow(a0, 3) * std::pow(1.0 + kappa * L, 3) *
         std::exp(-gamma1(profile) * kappa * sigma);
}

}  // namespace aefem
