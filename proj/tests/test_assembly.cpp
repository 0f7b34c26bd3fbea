#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "aefem/assembly.hpp"
#include "aefem/geometry.hpp"
#include "aefem/scenarios.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aefem;
using fixtures::cube;

namespace {

const TetVertices kRef{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

AcousticMatrix acoustic_oracle(const TetVertices& v, const PhysicsConfig& ph, const PmlProfile& prof, int n) {
  const TetGeometry g = tet_geometry(v);
  AcousticMatrix M;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      M(i, j) = oracle::duffy_tet<Complex>(v, n, [&](const std::array<double, 4>& l, const Vec3& x) {
        const auto c = pml_coefficients(x, prof);
        Complex s = 0.0;
        for (int k = 0; k < 3; ++k) s += c.A_diag[k] * g.grad[j][k] * g.grad[i][k];
        return s - ph.kappa * ph.kappa * c.b * l[j] * l[i];
      });
    }
  }
  return M;
}

ElasticMatrix elastic_oracle(const TetVertices& v, const PhysicsConfig& ph, int n) {
  const TetGeometry g = tet_geometry(v);
  ElasticMatrix M;
  for (int i = 0; i < 4; ++i) {
    for (int d = 0; d < 3; ++d) {
      for (int j = 0; j < 4; ++j) {
        for (int c = 0; c < 3; ++c) {
          // grad(phi_j e_c) = e_c grad(phi_j)^T
          Mat3 Gj = Mat3::Zero();
          Gj.row(c) = g.grad[j].transpose();
          Mat3 Gi = Mat3::Zero();
          Gi.row(d) = g.grad[i].transpose();
          const Mat3 sj = stress(Gj, ph.lambda, ph.mu);
          const double stiff = (sj.array() * Gi.array()).sum();
          M(3 * i + d, 3 * j + c) = oracle::duffy_tet<Complex>(v, n, [&](const std::array<double, 4>& l, const Vec3&) {
            return Complex(stiff - ph.omega * ph.omega * (c == d) * l[i] * l[j]);
          });
        }
      }
    }
  }
  return M;
}

template <typename M>
double max_rel_diff(const M& a, const M& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

TetMesh single_tet_mesh(int group) {
  std::ostringstream os;
  os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
     << "$Elements\n1\n1 4 2 " << group << " 1 1 2 3 4\n$EndElements\n";
  std::istringstream in(os.str());
  return import_msh(in);
}

TetMesh two_tet_interface_mesh() {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n5\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 1 1 1\n$EndNodes\n"
      "$Elements\n2\n1 4 2 1 1 1 2 3 4\n2 4 2 2 2 5 2 3 4\n$EndElements\n");
  return import_msh(in);
}

}  // namespace

TEST(DofMap, Examples) {
  const DofMap single = build_dof_map(single_tet_mesh(2));
  EXPECT_EQ(single.num_p, 4);
  EXPECT_EQ(single.u_count(), 0);

  const TetMesh two = two_tet_interface_mesh();
  const DofMap d = build_dof_map(two, true);
  EXPECT_EQ(d.num_p, 4);
  EXPECT_EQ(d.u_count(), 12);
  int both = 0;
  for (std::size_t v = 0; v < two.num_vertices(); ++v) both += (d.p_dof[v] >= 0 && d.u_dof[v] >= 0);
  EXPECT_EQ(both, 3);
  EXPECT_THROW(build_dof_map(single_tet_mesh(2), true), Error);
}

TEST(DofMap, InvariantsOnCoupledMesh) {
  const TetMesh m = fixtures::coupled_mesh();
  const DofMap d = build_dof_map(m);
  const DofMap d2 = build_dof_map(m);
  EXPECT_EQ(d.p_dof, d2.p_dof);
  EXPECT_EQ(d.u_dof, d2.u_dof);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const Vec3& x = m.vertices[v];
    const bool inside = x.cwiseAbs().maxCoeff() < 0.1 - 1e-9;
    const bool closure = ((x.array() >= -0.1 - 1e-12) && (x.array() <= 0.1 + 1e-12)).all();
    if (inside) EXPECT_LT(d.p_dof[v], 0);
    if (!closure) EXPECT_LT(d.u_dof[v], 0);
    if (closure && !inside) {
      EXPECT_GE(d.p_dof[v], 0);
      EXPECT_GE(d.u_dof[v], 0);
    }
    if (d.u_dof[v] >= 0) EXPECT_GE(d.u_dof[v], d.num_p);
  }
}

TEST(ElementAcoustic, ReferenceTetEntries) {
  PmlProfile off;
  PhysicsConfig ph;
  ph.kappa = 1e-300;  // stiffness only
  const AcousticMatrix K = element_acoustic(kRef, Region::Acoustic, ph, off);
  EXPECT_NEAR(K(0, 0).real(), 0.5, 1e-15);
  ph.kappa = 1.0;
  const AcousticMatrix M = K - element_acoustic(kRef, Region::Acoustic, ph, off);
  EXPECT_NEAR(M(1, 1).real(), 1.0 / 60.0, 1e-15);
  EXPECT_NEAR(M(1, 2).real(), 1.0 / 120.0, 1e-15);
  const AcousticMatrix A = element_acoustic(kRef, Region::Acoustic, ph, off);
  EXPECT_EQ(A.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(element_acoustic(kRef, Region::Elastic, ph, off), Error);
}

TEST(ElementAcoustic, MatchesOracleOnRandomTets) {
  std::mt19937_64 rng(2024);
  const PhysicsConfig ph = fixtures::example2_physics();
  const PmlProfile prof = fixtures::example2_profile();
  for (int k = 0; k < 50; ++k) {
    const TetVertices v = oracle::random_tet(rng, Vec3(0.1, -0.05, 0.2), 0.3);
    EXPECT_LE(max_rel_diff(element_acoustic(v, Region::Acoustic, ph, {}), acoustic_oracle(v, ph, PmlProfile{}, 6)), 1e-10);
  }
}

TEST(ElementAcoustic, PmlQuadratureConvergesUnderRefinement) {
  // A, b vary inside PML tets; the degree-4 rule error must fall like h^5 relative
  // to the integral for a shrinking tet at a fixed layer point.
  const PhysicsConfig ph = fixtures::example2_physics();
  const PmlProfile prof = fixtures::example2_profile();
  std::mt19937_64 rng(4);
  const TetVertices unit = oracle::random_tet(rng, Vec3::Zero(), 1.0);
  const Vec3 centre(0.8, 0.75, 0.3);
  std::vector<double> errs;
  for (double s : {0.1, 0.05, 0.025}) {
    TetVertices v;
    for (int i = 0; i < 4; ++i) v[i] = centre + s * unit[i];
    errs.push_back(max_rel_diff(element_acoustic(v, Region::Pml, ph, prof), acoustic_oracle(v, ph, prof, 14)));
  }
  EXPECT_LT(errs[1], errs[0] / 8.0);
  EXPECT_LT(errs[2], errs[1] / 8.0);
  EXPECT_LT(errs[2], 1e-6);
}

TEST(ElementAcoustic, DegreeChoiceIrrelevantForConstantCoefficients) {
  std::mt19937_64 rng(8);
  const PhysicsConfig ph = fixtures::example2_physics();
  for (int k = 0; k < 10; ++k) {
    const TetVertices v = oracle::random_tet(rng, Vec3::Zero(), 0.2);
    const AcousticMatrix a2 = element_acoustic(v, Region::Acoustic, ph, {}, 2);
    const AcousticMatrix a4 = element_acoustic(v, Region::Acoustic, ph, {}, 4);
    EXPECT_LE((a2 - a4).cwiseAbs().maxCoeff(), 1e-14 * a4.cwiseAbs().maxCoeff());
  }
}

TEST(ElementElastic, MatchesOracleOnRandomTets) {
  std::mt19937_64 rng(77);
  for (const PhysicsConfig& ph : {fixtures::example1_physics(), fixtures::example2_physics()}) {
    for (int k = 0; k < 50; ++k) {
      const TetVertices v = oracle::random_tet(rng, Vec3::Zero(), 0.25);
      EXPECT_LE(max_rel_diff(element_elastic(v, ph), elastic_oracle(v, ph, 5)), 1e-10);
    }
  }
  const PhysicsConfig ph = fixtures::example1_physics();
  EXPECT_LE(max_rel_diff(element_elastic(kRef, ph), elastic_oracle(kRef, ph, 5)), 1e-12);
}

TEST(ElementElastic, RigidMotionsInStiffnessNullSpace) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const TetVertices v = oracle::random_tet(rng, Vec3(0.3, 0.1, -0.2), 0.5);
    const ElasticMatrix K = element_elastic_stiffness(v, 0.5, 0.25);
    EXPECT_LE((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-13);
    for (int c = 0; c < 3; ++c) {
      Eigen::Matrix<Complex, 12, 1> t = Eigen::Matrix<Complex, 12, 1>::Zero();
      for (int i = 0; i < 4; ++i) t[3 * i + c] = 1.0;
      EXPECT_LE((K * t).norm(), 1e-12);
      const Vec3 w = Vec3::Unit(c);
      Eigen::Matrix<Complex, 12, 1> r;
      for (int i = 0; i < 4; ++i) r.segment<3>(3 * i) = w.cross(v[i]).cast<Complex>();
      EXPECT_LE((K * r).norm(), 1e-12);
    }
  }
}

TEST(CouplingFace, Examples) {
  PhysicsConfig ph;
  ph.omega = 1.0;
  ph.rho_a = 1.0;
  // Unit-area right triangle in the z = 0 plane.
  const std::array<Vec3, 3> v{Vec3(0, 0, 0), Vec3(std::sqrt(2.0), 0, 0), Vec3(0, std::sqrt(2.0), 0)};
  const CouplingBlocks b = coupling_face(v, Vec3(0, 0, 1), ph);
  EXPECT_NEAR(b.pu(1, 3 * 1 + 2).real(), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(b.pu(0, 3 * 1 + 2).real(), 1.0 / 12.0, 1e-15);

  ph.omega = 2.0;
  ph.rho_a = 1.3;
  const CouplingBlocks c = coupling_face(v, Vec3(1, 0, 0), ph);
  EXPECT_LE((c.pu - ph.rho_a * ph.omega * ph.omega * c.up.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(c.pu.col(3 * j + 1).norm(), 0.0);
    EXPECT_EQ(c.pu.col(3 * j + 2).norm(), 0.0);
  }
  // Oracle on a skew triangle.
  const std::array<Vec3, 3> s{Vec3(0.1, 0.2, 0.0), Vec3(0.5, -0.1, 0.3), Vec3(-0.2, 0.4, 0.6)};
  const Vec3 n = (s[1] - s[0]).cross(s[2] - s[0]).normalized();
  const CouplingBlocks d = coupling_face(s, n, ph);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double mij = oracle::duffy_tri<double>(s, 4, [&](const std::array<double, 3>& l, const Vec3&) { return l[i] * l[j]; });
      for (int a = 0; a < 3; ++a) {
        EXPECT_NEAR(d.up(3 * i + a, j).real(), n[a] * mij, 1e-15);
      }
    }
  }
}

TEST(CouplingFace, WrongTagRejected) {
  const TetMesh m = fixtures::coupled_mesh(0.1);
  for (const Face& f : m.faces) {
    if (f.tag == FaceTag::OuterGamma) {
      EXPECT_THROW(coupling_face(m, f, PhysicsConfig{}), Error);
      break;
    }
  }
}

TEST(EvaluateG, Examples) {
  const PhysicsConfig ph = fixtures::example2_physics();
  const PmlProfile prof = fixtures::example2_profile();
  const Scenario s = make_plane_wave_scenario(ph);
  EXPECT_EQ(evaluate_g(Vec3(0, 0, 0.3), Region::Acoustic, s, ph, prof), Complex(0.0));
  const Complex g = evaluate_g(Vec3(0, 0, 0.8), Region::Pml, s, ph, prof);
  EXPECT_NEAR(g.real(), 18.92, 0.01);
  EXPECT_NEAR(g.imag(), -8.47, 0.01);
  PmlProfile off = prof;
  off.sigma0 = 0.0;
  EXPECT_LE(std::abs(evaluate_g(Vec3(0.3, 0.9, 0.8), Region::Pml, s, ph, off)), 1e-12);
  EXPECT_THROW(evaluate_g(Vec3(0, 0, 0), Region::Elastic, s, ph, prof), Error);
}

TEST(Assemble, BlockIdentitiesOnCoupledMesh) {
  const TetMesh m = fixtures::coupled_mesh();
  const DofMap d = build_dof_map(m);
  PhysicsConfig ph = fixtures::example2_physics();
  ph.rho_a = 1.7;
  const Scenario s = make_plane_wave_scenario(ph);
  const ComplexSparseSystem sys = assemble(m, d, ph, {}, s);
  const Eigen::MatrixXcd A = Eigen::MatrixXcd(sys.matrix);
  const int np = d.num_p;
  const int nu = d.u_count();
  const Eigen::MatrixXcd Bpu = A.block(0, np, np, nu);
  const Eigen::MatrixXcd Bup = A.block(np, 0, nu, np);
  EXPECT_GT(Bpu.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((Bpu - ph.rho_a * ph.omega * ph.omega * Bup.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXcd Bpp = A.block(0, 0, np, np);
  EXPECT_LE((Bpp - Bpp.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXcd Buu = A.block(np, np, nu, nu);
  EXPECT_EQ(Buu.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((Buu - Buu.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, PmlBlockComplexSymmetric) {
  const TetMesh m = fixtures::small_pml_mesh();
  const DofMap d = build_dof_map(m);
  const PhysicsConfig ph = fixtures::example2_physics();
  const ComplexSparseSystem sys = assemble(m, d, ph, fixtures::small_pml_profile(), make_plane_wave_scenario(ph));
  const Eigen::SparseMatrix<Complex> pp = sys.matrix.topLeftCorner(d.num_p, d.num_p);
  double im = 0.0;
  for (int k = 0; k < pp.nonZeros(); ++k) im = std::max(im, std::abs(pp.valuePtr()[k].imag()));
  EXPECT_GT(im, 0.0);
  const Eigen::SparseMatrix<Complex> diff = pp - Eigen::SparseMatrix<Complex>(pp.transpose());
  double mx = 0.0;
  for (int k = 0; k < diff.nonZeros(); ++k) mx = std::max(mx, std::abs(diff.valuePtr()[k]));
  EXPECT_LE(mx, 1e-12);
  EXPECT_GT(sys.rhs.norm(), 0.0);
}

TEST(Assemble, OrderIndependent) {
  const TetMesh m = fixtures::small_pml_mesh();
  TetMesh p = m;
  std::vector<std::size_t> perm(m.num_tets());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    p.tets[i] = m.tets[perm[i]];
    p.region[i] = m.region[perm[i]];
    p.bisection[i] = m.bisection[perm[i]];
  }
  classify_faces(p);
  const PhysicsConfig ph = fixtures::example2_physics();
  const PmlProfile prof = fixtures::small_pml_profile();
  const Scenario s = make_plane_wave_scenario(ph);
  const DofMap d = build_dof_map(m);
  const ComplexSparseSystem a = assemble(m, d, ph, prof, s);
  const ComplexSparseSystem b = assemble(p, d, ph, prof, s);
  const Eigen::SparseMatrix<Complex> diff = a.matrix - b.matrix;
  double mx = 0.0, scale = 0.0;
  for (int k = 0; k < diff.nonZeros(); ++k) mx = std::max(mx, std::abs(diff.valuePtr()[k]));
  for (int k = 0; k < a.matrix.nonZeros(); ++k) scale = std::max(scale, std::abs(a.matrix.valuePtr()[k]));
  EXPECT_LE(mx, 1e-13 * scale);
  EXPECT_LE((a.rhs - b.rhs).cwiseAbs().maxCoeff(), 1e-13 * a.rhs.cwiseAbs().maxCoeff());
}

TEST(ApplyDirichlet, IdentityRowsAndValues) {
  const TetMesh m = fixtures::small_pml_mesh();
  const DofMap d = build_dof_map(m);
  const PhysicsConfig ph = fixtures::example2_physics();
  const Scenario s = make_plane_wave_scenario(ph);
  const ComplexSparseSystem raw = assemble(m, d, ph, fixtures::small_pml_profile(), s);
  const ComplexSparseSystem sys = apply_dirichlet(raw, m, d, FaceTag::OuterGamma, s.pressure);
  ASSERT_FALSE(sys.constrained.empty());
  const Eigen::MatrixXcd A(sys.matrix);
  for (const auto& [dof, value] : sys.constrained) {
    EXPECT_EQ(A.row(dof).cwiseAbs().sum(), 1.0);
    EXPECT_EQ(A(dof, dof), Complex(1.0));
    EXPECT_EQ(A.col(dof).cwiseAbs().sum(), 1.0);
    EXPECT_EQ(sys.rhs[dof], value);
  }
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const auto it = sys.constrained.find(d.p_dof[v]);
    if (it != sys.constrained.end()) {
      EXPECT_LE(std::abs(it->second - std::exp(-kI * ph.kappa * m.vertices[v][2])), 1e-15);
    }
  }
  const ComplexSparseSystem zero = apply_dirichlet(raw, m, d, FaceTag::OuterGamma, [](const Vec3&) { return Complex(0.0); });
  for (const auto& [dof, value] : zero.constrained) EXPECT_EQ(zero.rhs[dof], Complex(0.0));
  EXPECT_THROW(apply_dirichlet(raw, m, d, FaceTag::OuterGamma,
                               [](const Vec3&) { return Complex(std::nan(""), 0.0); }),
               Error);
}

TEST(ApplyDirichlet, ManufacturedUsesExactTrace) {
  const TetMesh m = fixtures::coupled_mesh();
  const DofMap d = build_dof_map(m);
  const PhysicsConfig ph = fixtures::example1_physics();
  const Scenario s = make_manufactured_scenario(ph, Vec3(1, 0, 0));
  const ComplexSparseSystem sys = apply_dirichlet(assemble(m, d, ph, {}, s), m, d, FaceTag::OuterGamma, s.pressure);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const auto it = sys.constrained.find(d.p_dof[v]);
    if (it != sys.constrained.end()) EXPECT_EQ(it->second, exact_pressure(m.vertices[v], 1.0, Vec3(1, 0, 0)));
  }
}
