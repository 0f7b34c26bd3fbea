#include "aefem/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "aefem/geometry.hpp"
#include "aefem/quadrature.hpp"

namespace aefem {

namespace {

double distance_or_throw(const Vec3& x, const Vec3& x0) {
  const double r = (x - x0).norm();
  if (!(r > 0.0)) throw Error("exact solution evaluated at the source point");
  return r;
}

}  // namespace

Complex exact_pressure(const Vec3& x, double kappa, const Vec3& x0) {
  const double r = distance_or_throw(x, x0);
  return std::exp(kI * kappa * r) / r;
}

CVec3 exact_gradient(const Vec3& x, double kappa, const Vec3& x0) {
  const double r = distance_or_throw(x, x0);
  const Complex p = std::exp(kI * kappa * r) / r;
  const Complex dp = p * (kI * kappa - 1.0 / r);
  return dp * ((x - x0) / r).cast<Complex>();
}

CMat3 exact_hessian(const Vec3& x, double kappa, const Vec3& x0) {
  // H = f'' e e^T + (f'/r)(I - e e^T) for the radial profile f(r).
  const double r = distance_or_throw(x, x0);
  const Complex f = std::exp(kI * kappa * r) / r;
  const Complex s = kI * kappa - 1.0 / r;
  const Complex df = f * s;
  const Complex ddf = f * (s * s + 1.0 / (r * r));
  const Vec3 e = (x - x0) / r;
  const Mat3 ee = e * e.transpose();
  return ddf * ee.cast<Complex>() + (df / r) * (Mat3::Identity() - ee).cast<Complex>();
}

ManufacturedSolution::ManufacturedSolution(const PhysicsConfig& physics, const Vec3& x0)
    : physics_(physics), x0_(x0) {}

double compatibility_defect(const PhysicsConfig& physics) {
  return physics.kappa * physics.kappa * (physics.lambda + 2.0 * physics.mu) -
         physics.omega * physics.omega;
}

void verify_compatibility(const PhysicsConfig& physics) {
  const double defect = compatibility_defect(physics);
  if (std::abs(defect) > 1e-12) {
    std::ostringstream os;
    os << "kappa^2 (lambda + 2 mu) - omega^2 = " << defect << " (must vanish)";
    throw Error(os.str());
  }
}

InterfaceData interface_data(const Vec3& x, const Vec3& n1, const ManufacturedSolution& solution) {
  const PhysicsConfig& ph = solution.physics();
  const CVec3 n = n1.cast<Complex>();
  const Complex p = solution.pressure(x);
  InterfaceData d;
  d.normal = n.dot(solution.pressure_gradient(x)) -
             ph.rho_a * ph.omega * ph.omega * n.dot(solution.displacement(x));
  d.traction = -p * n - stress(solution.displacement_gradient(x), ph.lambda, ph.mu) * n;
  return d;
}

Complex plane_wave(const Vec3& x, double kappa) { return std::exp(-kI * kappa * x[2]); }

Scenario make_manufactured_scenario(const PhysicsConfig& physics, const Vec3& x0) {
  verify_compatibility(physics);
  const ManufacturedSolution sol(physics, x0);
  Scenario s;
  s.mode = ScenarioMode::ManufacturedDirichlet;
  s.pressure = [sol](const Vec3& x) { return sol.pressure(x); };
  s.pressure_gradient = [sol](const Vec3& x) { return sol.pressure_gradient(x); };
  s.pressure_hessian = [sol](const Vec3& x) { return sol.pressure_hessian(x); };
  s.displacement = [sol](const Vec3& x) { return sol.displacement(x); };
  s.displacement_gradient = [sol](const Vec3& x) { return sol.displacement_gradient(x); };
  s.interface_normal_data = [sol](const Vec3& x, const Vec3& n) { return interface_data(x, n, sol).normal; };
  s.interface_traction_data = [sol](const Vec3& x, const Vec3& n) {
    return interface_data(x, n, sol).traction;
  };
  return s;
}

Scenario make_plane_wave_scenario(const PhysicsConfig& physics) {
  const double k = physics.kappa;
  Scenario s;
  s.mode = ScenarioMode::PlaneWavePml;
  s.pressure = [k](const Vec3& x) { return plane_wave(x, k); };
  s.pressure_gradient = [k](const Vec3& x) {
    return CVec3(0.0, 0.0, -kI * k * plane_wave(x, k));
  };
  s.pressure_hessian = [k](const Vec3& x) {
    CMat3 h = CMat3::Zero();
    h(2, 2) = -k * k * plane_wave(x, k);
    return h;
  };
  s.interface_normal_data = [](const Vec3&, const Vec3&) { return Complex(0.0); };
  s.interface_traction_data = [](const Vec3&, const Vec3&) { return CVec3(CVec3::Zero()); };
  return s;
}

H1Errors h1_errors(const TetMesh& mesh, const FieldPair& fields, const Scenario& scenario) {
  if (!scenario.has_exact_solution()) throw Error("h1_errors: scenario has no exact solution");
  double ep = 0.0;
  double eu = 0.0;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const Region r = mesh.region[t];
    if (r == Region::Pml) continue;
    const auto& c = mesh.tets[t];
    const TetVertices v = mesh.tet_vertices(t);
    const TetGeometry g = tet_geometry(v);
    if (r == Region::Acoustic) {
      CVec3 grad_h = CVec3::Zero();
      for (int i = 0; i < 4; ++i) grad_h += fields.p[c[i]] * g.grad[i].cast<Complex>();
      for (const auto& q : tet_rule(4)) {
        const Vec3 x = barycentric_point(v, q.bary);
        Complex ph = 0.0;
        for (int i = 0; i < 4; ++i) ph += q.bary[i] * fields.p[c[i]];
        const double val = std::norm(scenario.pressure(x) - ph) +
                           (scenario.pressure_gradient(x) - grad_h).squaredNorm();
        ep += q.weight * g.volume * val;
      }
    } else {
      CMat3 grad_h = CMat3::Zero();
      for (int i = 0; i < 4; ++i) grad_h += fields.u[c[i]] * g.grad[i].cast<Complex>().transpose();
      for (const auto& q : tet_rule(4)) {
        const Vec3 x = barycentric_point(v, q.bary);
        CVec3 uh = CVec3::Zero();
        for (int i = 0; i < 4; ++i) uh += q.bary[i] * fields.u[c[i]];
        const double val = (scenario.displacement(x) - uh).squaredNorm() +
                           (scenario.displacement_gradient(x) - grad_h).squaredNorm();
        eu += q.weight * g.volume * val;
      }
    }
  }
  // The degree-4 rule has a negative weight; guard against tiny negative round-off.
  return {std::sqrt(std::max(ep, 0.0)), std::sqrt(std::max(eu, 0.0))};
}

double fit_rate(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 2) throw Error("fit_rate: need at least two samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, e] : samples) {
    if (!(n > 0.0) || !(e > 0.0)) throw Error("fit_rate: samples must be positive");
    const double x = std::log(n);
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(samples.size());
  const double denom = m * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw Error("fit_rate: abscissae are all equal");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace aefem
