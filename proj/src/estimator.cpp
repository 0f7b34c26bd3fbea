#include "aefem/estimator.hpp"

#include <cmath>

#include "aefem/geometry.hpp"
#include "aefem/quadrature.hpp"

namespace aefem {

namespace {

CVec3 pressure_gradient(const TetMesh& mesh, std::size_t t, const FieldPair& fields) {
  const TetGeometry g = tet_geometry(mesh.tet_vertices(t));
  CVec3 grad = CVec3::Zero();
  for (int i = 0; i < 4; ++i) grad += fields.p[mesh.tets[t][i]] * g.grad[i].cast<Complex>();
  return grad;
}

CMat3 displacement_gradient(const TetMesh& mesh, std::size_t t, const FieldPair& fields) {
  const TetGeometry g = tet_geometry(mesh.tet_vertices(t));
  CMat3 grad = CMat3::Zero();
  for (int i = 0; i < 4; ++i) grad += fields.u[mesh.tets[t][i]] * g.grad[i].cast<Complex>().transpose();
  return grad;
}

std::array<Vec3, 3> face_points(const TetMesh& mesh, const Face& f) {
  return {mesh.vertices[f.vertices[0]], mesh.vertices[f.vertices[1]], mesh.vertices[f.vertices[2]]};
}

double face_diameter(const TetMesh& mesh, const Face& f) {
  const auto x = face_points(mesh, f);
  return triangle_diameter(x[0], x[1], x[2]);
}

bool in_pml(const TetMesh& mesh, int t, const PmlProfile& profile) {
  return t >= 0 && mesh.region[t] == Region::Pml && profile.enabled();
}

}  // namespace

double element_residual(const TetMesh& mesh, std::size_t t, const FieldPair& fields,
                        const PhysicsConfig& physics, const PmlProfile& profile,
                        const Scenario& scenario) {
  const TetVertices v = mesh.tet_vertices(t);
  const TetGeometry g = tet_geometry(v);
  const double hK = tet_diameter(v);
  const auto& c = mesh.tets[t];
  double sum = 0.0;
  if (mesh.region[t] == Region::Elastic) {
    // div sigma(u_h) vanishes for P1 fields with constant Lamé parameters.
    const double w2 = physics.omega * physics.omega;
    for (const auto& q : tet_rule(2)) {
      CVec3 uh = CVec3::Zero();
      for (int i = 0; i < 4; ++i) uh += q.bary[i] * fields.u[c[i]];
      sum += q.weight * g.volume * (w2 * uh).squaredNorm();
    }
  } else {
    const Region region = mesh.region[t];
    const bool pml = region == Region::Pml && profile.enabled();
    const CVec3 grad = pressure_gradient(mesh, t, fields);
    const double k2 = physics.kappa * physics.kappa;
    for (const auto& q : tet_rule(pml ? 4 : 2)) {
      const Vec3 x = barycentric_point(v, q.bary);
      Complex ph = 0.0;
      for (int i = 0; i < 4; ++i) ph += q.bary[i] * fields.p[c[i]];
      Complex r = k2 * ph;
      if (pml) {
        const auto coef = pml_coefficients(x, profile);
        const CVec3 dA = pml_coefficient_derivatives(x, profile);
        r = dA.cwiseProduct(grad).sum() + k2 * coef.b * ph - evaluate_g(x, region, scenario, physics, profile);
      }
      sum += q.weight * g.volume * std::norm(r);
    }
  }
  return hK * std::sqrt(std::max(sum, 0.0));
}

double face_jump_interior(const TetMesh& mesh, const Face& face, const FieldPair& fields,
                          const PhysicsConfig& physics, const PmlProfile& profile) {
  if (face.is_boundary()) throw Error("face_jump_interior: face lies on the boundary of D");
  if (face.tag == FaceTag::InterfaceGammaS) throw Error("face_jump_interior: face lies on Gamma_s");
  const Region r1 = mesh.region[face.tet1];
  const CVec3 nu = face.normal.cast<Complex>();
  if (r1 == Region::Elastic) {
    const CMat3 s1 = stress(displacement_gradient(mesh, face.tet1, fields), physics.lambda, physics.mu);
    const CMat3 s2 = stress(displacement_gradient(mesh, face.tet2, fields), physics.lambda, physics.mu);
    return ((s1 - s2) * nu).norm() * std::sqrt(face.area);
  }
  const CVec3 g1 = pressure_gradient(mesh, face.tet1, fields);
  const CVec3 g2 = pressure_gradient(mesh, face.tet2, fields);
  const bool pml = in_pml(mesh, face.tet1, profile) || in_pml(mesh, face.tet2, profile);
  if (!pml) return std::abs((g1 - g2).dot(nu)) * std::sqrt(face.area);
  const auto x = face_points(mesh, face);
  double sum = 0.0;
  for (const auto& q : tri_rule(4)) {
    const Vec3 xq = q.bary[0] * x[0] + q.bary[1] * x[1] + q.bary[2] * x[2];
    const CVec3 A = pml_coefficients(xq, profile).A_diag;
    // A is diagonal, so (A g) . nu = sum_j A_j g_j nu_j; conj-free dot keeps it bilinear.
    const Complex jump = (A.cwiseProduct(g1 - g2)).cwiseProduct(face.normal.cast<Complex>()).sum();
    sum += q.weight * face.area * std::norm(jump);
  }
  return std::sqrt(std::max(sum, 0.0));
}

InterfaceJumps face_jump_interface(const TetMesh& mesh, const Face& face, const FieldPair& fields,
                                   const PhysicsConfig& physics, const Scenario& scenario) {
  if (face.tag != FaceTag::InterfaceGammaS) throw Error("face_jump_interface: face is not on Gamma_s");
  const Vec3& nu = face.normal;
  const CVec3 nuc = nu.cast<Complex>();
  const CVec3 grad_p = pressure_gradient(mesh, face.tet1, fields);
  const CMat3 sigma = stress(displacement_gradient(mesh, face.tet2, fields), physics.lambda, physics.mu);
  const Complex dp_dnu = (grad_p.cwiseProduct(nuc)).sum();
  const CVec3 sigma_nu = sigma * nuc;
  const double rw2 = physics.rho_a * physics.omega * physics.omega;
  const bool with_data = scenario.mode == ScenarioMode::ManufacturedDirichlet;
  const auto x = face_points(mesh, face);

  double kin = 0.0;
  double tra = 0.0;
  for (const auto& q : tri_rule(4)) {
    const Vec3 xq = q.bary[0] * x[0] + q.bary[1] * x[1] + q.bary[2] * x[2];
    Complex ph = 0.0;
    CVec3 uh = CVec3::Zero();
    for (int i = 0; i < 3; ++i) {
      ph += q.bary[i] * fields.p[face.vertices[i]];
      uh += q.bary[i] * fields.u[face.vertices[i]];
    }
    Complex jk = dp_dnu - rw2 * (uh.cwiseProduct(nuc)).sum();
    CVec3 jt = -ph * nuc - sigma_nu;
    if (with_data) {
      jk -= scenario.interface_normal_data(xq, nu);
      jt -= scenario.interface_traction_data(xq, nu);
    }
    kin += q.weight * face.area * std::norm(jk);
    tra += q.weight * face.area * jt.squaredNorm();
  }
  return {std::sqrt(std::max(kin, 0.0)), std::sqrt(std::max(tra, 0.0))};
}

double eta_local(double residual_norm, std::span<const FaceContribution> faces) {
  double sum = residual_norm * residual_norm;
  for (const auto& f : faces) {
    const double w = f.on_interface ? 1.0 : 0.5;
    sum += w * f.h_e * f.jump_norm * f.jump_norm;
  }
  return std::sqrt(sum);
}

double boundary_interpolation_squared(const TetMesh& mesh, const Face& face,
                                      const std::function<Complex(const Vec3&)>& data,
                                      const std::function<CVec3(const Vec3&)>& data_gradient) {
  const auto x = face_points(mesh, face);
  const std::array<Complex, 3> nodal{data(x[0]), data(x[1]), data(x[2])};
  // Surface gradient of the interpolant through the tangent-plane metric.
  const Vec3 t1 = x[1] - x[0];
  const Vec3 t2 = x[2] - x[0];
  Eigen::Matrix2d G;
  G << t1.dot(t1), t1.dot(t2), t2.dot(t1), t2.dot(t2);
  const Eigen::Matrix2d Ginv = G.inverse();
  const Complex d1 = nodal[1] - nodal[0];
  const Complex d2 = nodal[2] - nodal[0];
  const Complex c1 = Ginv(0, 0) * d1 + Ginv(0, 1) * d2;
  const Complex c2 = Ginv(1, 0) * d1 + Ginv(1, 1) * d2;
  const CVec3 grad_interp = c1 * t1.cast<Complex>() + c2 * t2.cast<Complex>();
  const Mat3 tangential = Mat3::Identity() - face.normal * face.normal.transpose();

  double l2 = 0.0;
  double h1 = 0.0;
  for (const auto& q : tri_rule(4)) {
    const Vec3 xq = q.bary[0] * x[0] + q.bary[1] * x[1] + q.bary[2] * x[2];
    const Complex interp = q.bary[0] * nodal[0] + q.bary[1] * nodal[1] + q.bary[2] * nodal[2];
    l2 += q.weight * face.area * std::norm(data(xq) - interp);
    const CVec3 dg = tangential.cast<Complex>() * data_gradient(xq) - grad_interp;
    h1 += q.weight * face.area * dg.squaredNorm();
  }
  return std::max(l2, 0.0) / face_diameter(mesh, face) + std::max(h1, 0.0);
}

EstimatorReport global_report(const TetMesh& mesh, const FieldPair& fields,
                              const PhysicsConfig& physics, const PmlProfile& profile,
                              const Scenario& scenario, std::optional<double> pml_sigma) {
  const std::size_t nt = mesh.num_tets();
  EstimatorReport rep;
  std::vector<double> eta2(nt, 0.0);
  std::vector<double> boundary2(nt, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const double r = element_residual(mesh, t, fields, physics, profile, scenario);
    eta2[t] = r * r;
  }

  double trace2 = 0.0;
  for (const Face& f : mesh.faces) {
    const double he = face_diameter(mesh, f);
    if (f.is_boundary()) {
      if (f.tag == FaceTag::OuterGamma && mesh.region[f.tet1] != Region::Elastic) {
        const double s2 = boundary_interpolation_squared(mesh, f, scenario.pressure, scenario.pressure_gradient);
        boundary2[f.tet1] += s2;
        rep.boundary_interp_term += s2;
      }
      continue;
    }
    if (f.tag == FaceTag::InterfaceGammaS) {
      const InterfaceJumps j = face_jump_interface(mesh, f, fields, physics, scenario);
      eta2[f.tet1] += he * j.kinematic * j.kinematic;
      eta2[f.tet2] += he * j.traction * j.traction;
      continue;
    }
    const double j = face_jump_interior(mesh, f, fields, physics, profile);
    eta2[f.tet1] += 0.5 * he * j * j;
    eta2[f.tet2] += 0.5 * he * j * j;
    if (f.tag == FaceTag::PmlInnerBoundaryB) {
      const auto x = face_points(mesh, f);
      for (const auto& q : tri_rule(4)) {
        const Vec3 xq = q.bary[0] * x[0] + q.bary[1] * x[1] + q.bary[2] * x[2];
        Complex ph = 0.0;
        for (int i = 0; i < 3; ++i) ph += q.bary[i] * fields.p[f.vertices[i]];
        trace2 += q.weight * f.area * std::norm(ph - scenario.pressure(xq));
      }
    }
  }

  rep.eta.resize(nt);
  rep.eta_hat.resize(nt);
  double sp = 0.0;
  double su = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    rep.eta[t] = std::sqrt(eta2[t]);
    rep.eta_hat[t] = rep.eta[t] + std::sqrt(boundary2[t]);
    (mesh.region[t] == Region::Elastic ? su : sp) += eta2[t];
  }
  rep.eta_p_total = std::sqrt(sp);
  rep.eta_u_total = std::sqrt(su);
  rep.eta_total = std::sqrt(sp + su);
  rep.boundary_interp_term = std::sqrt(rep.boundary_interp_term);
  rep.eps_fem = rep.eta_total + rep.boundary_interp_term;
  rep.pml_trace_norm = std::sqrt(std::max(trace2, 0.0));
  if (profile.enabled() && scenario.mode == ScenarioMode::PlaneWavePml) {
    rep.pml_bound = pml_bound(profile, physics.kappa, pml_sigma.value_or(profile.sigma0));
    rep.eps_pml = rep.pml_bound * rep.pml_trace_norm;
  }
  return rep;
}

}  // namespace aefem
