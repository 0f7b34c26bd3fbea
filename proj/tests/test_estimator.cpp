#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "aefem/estimator.hpp"
#include "aefem/geometry.hpp"
#include "aefem/quadrature.hpp"
#include "aefem/scenarios.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aefem;
using fixtures::cube;

namespace {

// Corner tet and its mirror image across x = 0; the shared face has area 1/2.
TetMesh mirrored_pair(int group) {
  std::ostringstream os;
  os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n5\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 -1 0 0\n$EndNodes\n"
     << "$Elements\n2\n1 4 2 " << group << " 1 1 2 3 4\n2 4 2 " << group << " 1 1 5 3 4\n$EndElements\n";
  std::istringstream in(os.str());
  return import_msh(in);
}

// Elastic corner tet below the plane x + y + z = 1, acoustic tet above it.
TetMesh interface_pair() {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n5\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 1 1 1\n$EndNodes\n"
      "$Elements\n2\n1 4 2 1 1 1 2 3 4\n2 4 2 2 2 5 2 3 4\n$EndElements\n");
  return import_msh(in);
}

FieldPair zero_fields(const TetMesh& m) {
  return {std::vector<Complex>(m.num_vertices(), 0.0), std::vector<CVec3>(m.num_vertices(), CVec3::Zero())};
}

const Face& shared_face(const TetMesh& m) {
  for (const Face& f : m.faces) {
    if (!f.is_boundary()) return f;
  }
  throw Error("no interior face");
}

FieldPair random_fields(const TetMesh& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  FieldPair f = zero_fields(m);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    f.p[v] = Complex(g(rng), g(rng));
    f.u[v] = CVec3(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)));
  }
  return f;
}

}  // namespace

TEST(FaceJump, LinearFieldsHaveNoJumps) {
  BoxRegions r;
  r.acoustic_box = cube(-0.5, 0.5);
  r.elastic_box = cube(-0.2, 0.2);
  const TetMesh m = generate_box_mesh(cube(-0.5, 0.5), 0.1, r);
  FieldPair f = zero_fields(m);
  const CVec3 a(Complex(1, 2), Complex(-0.5, 0), Complex(0.3, -1));
  CMat3 G;
  G << 1.0, 2.0, kI, 0.0, -1.0, 0.5, 3.0, kI, 0.2;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const CVec3 x = m.vertices[v].cast<Complex>();
    f.p[v] = a.dot(x) + 0.7;
    f.u[v] = G * x;
  }
  const PhysicsConfig ph = fixtures::example2_physics();
  int checked = 0;
  for (const Face& face : m.faces) {
    if (face.is_boundary() || face.tag == FaceTag::InterfaceGammaS) continue;
    EXPECT_LE(face_jump_interior(m, face, f, ph, {}), 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(FaceJump, AcousticKinkOracle) {
  const TetMesh m = mirrored_pair(2);
  FieldPair f = zero_fields(m);
  // p = max(x, 0): gradient (1, 0, 0) on one side, zero on the other.
  for (std::size_t v = 0; v < m.num_vertices(); ++v) f.p[v] = std::max(m.vertices[v][0], 0.0);
  const Face& face = shared_face(m);
  EXPECT_NEAR(face.area, 0.5, 1e-15);
  EXPECT_NEAR(face_jump_interior(m, face, f, PhysicsConfig{}, {}), std::sqrt(0.5), 1e-14);
}

TEST(FaceJump, ElasticKinkOracle) {
  const TetMesh m = mirrored_pair(1);
  FieldPair f = zero_fields(m);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) f.u[v] = CVec3(std::max(m.vertices[v][0], 0.0), 0.0, 0.0);
  PhysicsConfig ph;
  ph.lambda = 0.7;
  ph.mu = 1.3;
  // sigma = diag(lambda + 2 mu, lambda, lambda) on one side, zero on the other; nu = +-e1.
  EXPECT_NEAR(face_jump_interior(m, shared_face(m), f, ph, {}), (ph.lambda + 2 * ph.mu) * std::sqrt(0.5), 1e-13);
  EXPECT_THROW(face_jump_interface(m, shared_face(m), f, ph, make_plane_wave_scenario(ph)), Error);
}

TEST(FaceJump, BoundaryAndInterfaceFacesRejected) {
  const TetMesh m = interface_pair();
  const FieldPair f = zero_fields(m);
  for (const Face& face : m.faces) EXPECT_THROW(face_jump_interior(m, face, f, PhysicsConfig{}, {}), Error);
}

TEST(InterfaceJump, Examples) {
  const TetMesh m = interface_pair();
  const Face& face = shared_face(m);
  ASSERT_EQ(face.tag, FaceTag::InterfaceGammaS);
  const double area = std::sqrt(3.0) / 2.0;
  PhysicsConfig ph;
  ph.omega = 1.5;
  ph.rho_a = 0.8;
  const Scenario pw = make_plane_wave_scenario(ph);

  // Constant pressure c, no displacement: only the traction -c nu survives.
  FieldPair f = zero_fields(m);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) f.p[v] = 2.0;
  InterfaceJumps j = face_jump_interface(m, face, f, ph, pw);
  EXPECT_NEAR(j.kinematic, 0.0, 1e-14);
  EXPECT_NEAR(j.traction, 2.0 * std::sqrt(area), 1e-14);

  // Rigid translation a e1, no pressure: only rho_a omega^2 a nu_1 survives.
  f = zero_fields(m);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) f.u[v] = CVec3(0.5, 0.0, 0.0);
  j = face_jump_interface(m, face, f, ph, pw);
  EXPECT_NEAR(j.kinematic, ph.rho_a * ph.omega * ph.omega * 0.5 / std::sqrt(3.0) * std::sqrt(area), 1e-14);
  EXPECT_NEAR(j.traction, 0.0, 1e-14);
}

TEST(InterfaceJump, ExactSolutionSatisfiesManufacturedData) {
  // For the exact pair the interface data are by definition the defects of the exact
  // traces; a P1 approximation only leaves the interpolation defect, which vanishes
  // as the face shrinks.
  const PhysicsConfig ph = fixtures::example1_physics();
  const Scenario s = make_manufactured_scenario(ph, Vec3(1, 0, 0));
  std::vector<double> ratios;
  for (double h : {0.1, 0.05}) {
    const TetMesh m = fixtures::coupled_mesh(h);
    const FieldPair f = interpolate_exact(m, build_dof_map(m), s);
    double kin = 0.0, tra = 0.0, area = 0.0;
    for (const Face& face : m.faces) {
      if (face.tag != FaceTag::InterfaceGammaS) continue;
      const InterfaceJumps j = face_jump_interface(m, face, f, ph, s);
      kin += j.kinematic * j.kinematic;
      tra += j.traction * j.traction;
      area += face.area;
    }
    EXPECT_NEAR(area, 6 * 0.04, 1e-12);
    ratios.push_back(std::sqrt(kin + tra));
  }
  EXPECT_GT(ratios[0] / ratios[1], 1.7);
}

TEST(EtaLocal, Examples) {
  EXPECT_DOUBLE_EQ(eta_local(0.3, {}), 0.3);
  const std::vector<FaceContribution> faces{{0.5, 0.4, false}, {0.2, 1.0, true}};
  EXPECT_NEAR(eta_local(0.1, faces), 0.5, 1e-15);
  const std::vector<FaceContribution> one{{0.1, 0.2, false}};
  EXPECT_NEAR(eta_local(0.374, one), std::sqrt(0.374 * 0.374 + 0.5 * 0.1 * 0.04), 1e-15);
}

TEST(ElementResidual, AcousticAndElasticClosedForm) {
  const TetMesh m = mirrored_pair(2);
  FieldPair f = zero_fields(m);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) f.p[v] = 1.0;
  PhysicsConfig ph;
  ph.kappa = 3.0;
  const Scenario pw = make_plane_wave_scenario(ph);
  // R = kappa^2, ||R|| = 9 sqrt(1/6), h_K = sqrt(2).
  EXPECT_NEAR(element_residual(m, 0, f, ph, {}, pw), std::sqrt(2.0) * 9.0 * std::sqrt(1.0 / 6.0), 1e-13);

  const TetMesh e = mirrored_pair(1);
  f = zero_fields(e);
  for (std::size_t v = 0; v < e.num_vertices(); ++v) f.u[v] = CVec3(0.0, 2.0, 0.0);
  ph.omega = 0.5;
  EXPECT_NEAR(element_residual(e, 1, f, ph, {}, pw), std::sqrt(2.0) * 0.5 * std::sqrt(1.0 / 6.0), 1e-14);
}

TEST(ElementResidual, PmlMatchesFiniteDifferenceOracle) {
  const TetMesh m = fixtures::small_pml_mesh();
  const PmlProfile prof = fixtures::small_pml_profile();
  const PhysicsConfig ph = fixtures::example2_physics();
  const Scenario s = make_plane_wave_scenario(ph);
  FieldPair f = zero_fields(m);
  const CVec3 a(Complex(0.4, 1.0), Complex(-2.0, 0.5), Complex(1.0, 0.0));
  for (std::size_t v = 0; v < m.num_vertices(); ++v) f.p[v] = a.dot(m.vertices[v].cast<Complex>()) + 1.0;
  // |div(A grad p) + kappa^2 b p - g|^2 for linear p (gradient conj(a)), with d_j A_jj
  // from finite differences of the coefficients.
  auto integrand = [&](const std::array<double, 4>&, const Vec3& x) {
    Complex div = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double step = 1e-6;
      const Vec3 e = step * Vec3::Unit(j);
      auto A = [&](const Vec3& y) { return pml_coefficients(y, prof).A_diag[j]; };
      // Second-order one-sided differences near the outer boundary.
      const double room = 0.5 - std::abs(x[j]);
      const double sgn = x[j] > 0 ? -1.0 : 1.0;
      const Complex dA = room > 2 * step ? (A(x + e) - A(x - e)) / (2 * step)
                                         : -sgn * (3.0 * A(x) - 4.0 * A(x + sgn * e) + A(x + 2 * sgn * e)) / (2 * step);
      div += dA * std::conj(a[j]);
    }
    const Complex p = a.dot(x.cast<Complex>()) + 1.0;
    return std::norm(div + ph.kappa * ph.kappa * pml_coefficients(x, prof).b * p - evaluate_g(x, Region::Pml, s, ph, prof));
  };
  int checked = 0;
  for (std::size_t t = 0; t < m.num_tets() && checked < 20; t += 37) {
    if (m.region[t] != Region::Pml) continue;
    const TetVertices v = m.tet_vertices(t);
    const double vol = tet_geometry(v).volume;
    double q4 = 0.0;
    for (const auto& q : tet_rule(4)) q4 += q.weight * vol * integrand(q.bary, barycentric_point(v, q.bary));
    const double expected = tet_diameter(v) * std::sqrt(q4);
    EXPECT_NEAR(element_residual(m, t, f, ph, prof, s), expected, 1e-6 * expected);

    // The rule itself converges to the converged collapsed-coordinate value as the
    // tet shrinks about its centroid.
    const Vec3 c = 0.25 * (v[0] + v[1] + v[2] + v[3]);
    TetVertices w;
    for (int i = 0; i < 4; ++i) w[i] = c + 0.25 * (v[i] - c);
    const double wvol = tet_geometry(w).volume;
    double wq = 0.0;
    for (const auto& q : tet_rule(4)) wq += q.weight * wvol * integrand(q.bary, barycentric_point(w, q.bary));
    const double ref = oracle::duffy_tet<double>(w, 10, integrand);
    EXPECT_NEAR(wq, ref, 1e-3 * ref);
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(GlobalReport, FaceAccountingMatchesLocalPieces) {
  const TetMesh m = fixtures::small_pml_mesh();
  const PmlProfile prof = fixtures::small_pml_profile();
  const PhysicsConfig ph = fixtures::example2_physics();
  const Scenario s = make_plane_wave_scenario(ph);
  const FieldPair f = random_fields(m, 21);
  const EstimatorReport rep = global_report(m, f, ph, prof, s);

  std::vector<std::vector<FaceContribution>> per_tet(m.num_tets());
  for (const Face& face : m.faces) {
    if (face.is_boundary()) continue;
    const auto x = std::array<Vec3, 3>{m.vertices[face.vertices[0]], m.vertices[face.vertices[1]], m.vertices[face.vertices[2]]};
    const double he = triangle_diameter(x[0], x[1], x[2]);
    if (face.tag == FaceTag::InterfaceGammaS) {
      const InterfaceJumps j = face_jump_interface(m, face, f, ph, s);
      per_tet[face.tet1].push_back({he, j.kinematic, true});
      per_tet[face.tet2].push_back({he, j.traction, true});
    } else {
      const double j = face_jump_interior(m, face, f, ph, prof);
      per_tet[face.tet1].push_back({he, j, false});
      per_tet[face.tet2].push_back({he, j, false});
    }
  }
  double sp = 0.0, su = 0.0;
  for (std::size_t t = 0; t < m.num_tets(); ++t) {
    const double eta = eta_local(element_residual(m, t, f, ph, prof, s), per_tet[t]);
    EXPECT_NEAR(rep.eta[t], eta, 1e-12 * eta);
    EXPECT_GE(rep.eta_hat[t], rep.eta[t]);
    (m.region[t] == Region::Elastic ? su : sp) += eta * eta;
  }
  EXPECT_NEAR(rep.eta_p_total, std::sqrt(sp), 1e-10 * std::sqrt(sp));
  EXPECT_NEAR(rep.eta_u_total, std::sqrt(su), 1e-10 * std::sqrt(su));
  EXPECT_NEAR(rep.eta_total, std::hypot(rep.eta_p_total, rep.eta_u_total), 1e-10 * rep.eta_total);
  EXPECT_DOUBLE_EQ(rep.eps_fem, rep.eta_total + rep.boundary_interp_term);
  EXPECT_GT(rep.pml_bound, 0.0);
  EXPECT_DOUBLE_EQ(rep.eps_pml, rep.pml_bound * rep.pml_trace_norm);
  EXPECT_DOUBLE_EQ(rep.pml_bound, pml_bound(prof, ph.kappa));
}

TEST(GlobalReport, PmlTraceNormOracle) {
  // With p_h equal to the nodal interpolant of p_inc, the trace term is the L2(dB)
  // interpolation error of p_inc, which falls at second order.
  const PmlProfile prof = fixtures::small_pml_profile();
  const PhysicsConfig ph = fixtures::example2_physics();
  const Scenario s = make_plane_wave_scenario(ph);
  std::vector<double> norms;
  for (double h : {0.1, 0.05}) {
    const TetMesh m = fixtures::small_pml_mesh(h);
    FieldPair f = zero_fields(m);
    for (std::size_t v = 0; v < m.num_vertices(); ++v) f.p[v] = s.pressure(m.vertices[v]);
    norms.push_back(global_report(m, f, ph, prof, s).pml_trace_norm);
    FieldPair z = zero_fields(m);
    // p_h = 0 gives ||p_inc||_{L2(dB)} = sqrt(area of dB) since |p_inc| = 1.
    EXPECT_NEAR(global_report(m, z, ph, prof, s).pml_trace_norm, std::sqrt(6 * 0.36), 1e-12);
  }
  EXPECT_GT(norms[0] / norms[1], 3.5);
  EXPECT_LT(norms[0] / norms[1], 4.5);
}

TEST(GlobalReport, HomogeneousInFieldsWithoutData) {
  const TetMesh m = fixtures::coupled_mesh();
  const PhysicsConfig ph = fixtures::example2_physics();
  const Scenario s = make_plane_wave_scenario(ph);
  const FieldPair f = random_fields(m, 5);
  FieldPair g = f;
  const Complex alpha(-1.5, 2.0);
  for (auto& p : g.p) p *= alpha;
  for (auto& u : g.u) u *= alpha;
  const EstimatorReport a = global_report(m, f, ph, {}, s);
  const EstimatorReport b = global_report(m, g, ph, {}, s);
  EXPECT_NEAR(b.eta_total, std::abs(alpha) * a.eta_total, 1e-12 * b.eta_total);
  for (std::size_t t = 0; t < m.num_tets(); t += 17) EXPECT_NEAR(b.eta[t], std::abs(alpha) * a.eta[t], 1e-12 * b.eta[t]);
  EXPECT_EQ(global_report(m, zero_fields(m), ph, {}, s).eta_total, 0.0);
  EXPECT_EQ(a.eps_pml, 0.0);
}

TEST(GlobalReport, ManufacturedModeHasNoPmlTerm) {
  const TetMesh m = fixtures::coupled_mesh();
  const PhysicsConfig ph = fixtures::example1_physics();
  const Scenario s = make_manufactured_scenario(ph, Vec3(1, 0, 0));
  const EstimatorReport rep = global_report(m, interpolate_exact(m, build_dof_map(m), s), ph, {}, s);
  EXPECT_EQ(rep.eps_pml, 0.0);
  EXPECT_EQ(rep.pml_bound, 0.0);
  EXPECT_GT(rep.boundary_interp_term, 0.0);
  EXPECT_DOUBLE_EQ(rep.eps_fem, rep.eta_total + rep.boundary_interp_term);
}

TEST(BoundarySurrogate, ZeroForLinearDataAndFirstOrderOtherwise) {
  BoxRegions r;
  r.acoustic_box = cube(-0.3, 0.3);
  auto total = [&](double h, const std::function<Complex(const Vec3&)>& d, const std::function<CVec3(const Vec3&)>& dg) {
    const TetMesh m = generate_box_mesh(cube(-0.3, 0.3), h, r);
    double s = 0.0;
    for (const Face& f : m.faces) {
      if (f.tag == FaceTag::OuterGamma) s += boundary_interpolation_squared(m, f, d, dg);
    }
    return std::sqrt(s);
  };
  const CVec3 a(Complex(1, -1), 2.0, Complex(0, 3));
  EXPECT_LE(total(0.1, [&](const Vec3& x) { return a.dot(x.cast<Complex>()) + 4.0; },
                  [&](const Vec3&) { return CVec3(a.conjugate()); }),
            1e-12);

  const Vec3 x0(1, 0, 0);
  auto p = [&](const Vec3& x) { return exact_pressure(x, 1.0, x0); };
  auto dp = [&](const Vec3& x) { return exact_gradient(x, 1.0, x0); };
  const double coarse = total(0.1, p, dp);
  const double fine = total(0.05, p, dp);
  // The H1 seminorm part dominates, so halving h roughly halves the surrogate.
  EXPECT_GT(coarse / fine, 1.8);
  EXPECT_LT(coarse / fine, 2.2);
}
