#include "aefem/assembly.hpp"

#include <cmath>
#include <set>

#include "aefem/geometry.hpp"
#include "aefem/quadrature.hpp"

namespace aefem {

DofMap build_dof_map(const TetMesh& mesh, bool require_coupled) {
  DofMap dofs;
  const std::size_t nv = mesh.num_vertices();
  std::vector<char> has_p(nv, 0);
  std::vector<char> has_u(nv, 0);
  bool any_elastic = false;
  bool any_fluid = false;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const bool elastic = mesh.region[t] == Region::Elastic;
    (elastic ? any_elastic : any_fluid) = true;
    for (int v : mesh.tets[t]) (elastic ? has_u : has_p)[v] = 1;
  }
  if (require_coupled && !(any_elastic && any_fluid)) {
    throw Error("build_dof_map: coupled problem needs both an elastic and an acoustic region");
  }
  dofs.p_dof.assign(nv, -1);
  dofs.u_dof.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (has_p[v]) dofs.p_dof[v] = dofs.num_p++;
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (has_u[v]) dofs.u_dof[v] = dofs.num_p + 3 * dofs.num_u++;
  }
  return dofs;
}

FieldPair extract_fields(const DofMap& dofs, const Eigen::VectorXcd& solution) {
  if (solution.size() != dofs.size()) throw Error("extract_fields: solution size mismatch");
  FieldPair f;
  const std::size_t nv = dofs.p_dof.size();
  f.p.assign(nv, Complex(0.0));
  f.u.assign(nv, CVec3::Zero());
  for (std::size_t v = 0; v < nv; ++v) {
    if (dofs.p_dof[v] >= 0) f.p[v] = solution[dofs.p_dof[v]];
    if (dofs.u_dof[v] >= 0) f.u[v] = solution.segment<3>(dofs.u_dof[v]);
  }
  return f;
}

FieldPair interpolate_exact(const TetMesh& mesh, const DofMap& dofs, const Scenario& scenario) {
  FieldPair f;
  const std::size_t nv = mesh.num_vertices();
  f.p.assign(nv, Complex(0.0));
  f.u.assign(nv, CVec3::Zero());
  for (std::size_t v = 0; v < nv; ++v) {
    if (dofs.p_dof[v] >= 0) f.p[v] = scenario.pressure(mesh.vertices[v]);
    if (dofs.u_dof[v] >= 0 && scenario.displacement) f.u[v] = scenario.displacement(mesh.vertices[v]);
  }
  return f;
}

int acoustic_quadrature_degree(Region region, const PmlProfile& profile) {
  return (region == Region::Pml && profile.enabled()) ? 4 : 2;
}

AcousticMatrix element_acoustic(const TetVertices& v, Region region, const PhysicsConfig& physics,
                                const PmlProfile& profile, int degree) {
  if (region == Region::Elastic) throw Error("element_acoustic: tet is elastic");
  const TetGeometry g = tet_geometry(v);
  if (degree == 0) degree = acoustic_quadrature_degree(region, profile);
  const double k2 = physics.kappa * physics.kappa;
  AcousticMatrix M = AcousticMatrix::Zero();
  for (const auto& q : tet_rule(degree)) {
    CVec3 A = CVec3::Ones();
    Complex b = 1.0;
    if (region == Region::Pml) {
      const auto c = pml_coefficients(barycentric_point(v, q.bary), profile);
      A = c.A_diag;
      b = c.b;
    }
    const double w = q.weight * g.volume;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Complex s = 0.0;
        for (int a = 0; a < 3; ++a) s += A[a] * g.grad[j][a] * g.grad[i][a];
        M(i, j) += w * (s - k2 * b * q.bary[j] * q.bary[i]);
      }
    }
  }
  return M;
}

ElasticMatrix element_elastic_stiffness(const TetVertices& v, double lambda, double mu) {
  const TetGeometry g = tet_geometry(v);
  ElasticMatrix K = ElasticMatrix::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int d = 0; d < 3; ++d) {
      for (int j = 0; j < 4; ++j) {
        for (int c = 0; c < 3; ++c) {
          const double shear = (c == d ? g.grad[j].dot(g.grad[i]) : 0.0) + g.grad[j][d] * g.grad[i][c];
          const double bulk = g.grad[j][c] * g.grad[i][d];
          K(3 * i + d, 3 * j + c) = g.volume * (mu * shear + lambda * bulk);
        }
      }
    }
  }
  return K;
}

ElasticMatrix element_elastic(const TetVertices& v, const PhysicsConfig& physics) {
  ElasticMatrix M = element_elastic_stiffness(v, physics.lambda, physics.mu);
  const double vol = tet_geometry(v).volume;
  const double w2 = physics.omega * physics.omega;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double mass = vol * (i == j ? 2.0 : 1.0) / 20.0;
      for (int c = 0; c < 3; ++c) M(3 * i + c, 3 * j + c) -= w2 * mass;
    }
  }
  return M;
}

CouplingBlocks coupling_face(const std::array<Vec3, 3>& v, const Vec3& n1,
                             const PhysicsConfig& physics) {
  const double area = triangle_area(v[0], v[1], v[2]);
  Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
  for (const auto& q : tri_rule(2)) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) mass(i, j) += q.weight * area * q.bary[i] * q.bary[j];
    }
  }
  const double rw2 = physics.rho_a * physics.omega * physics.omega;
  CouplingBlocks blocks;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int c = 0; c < 3; ++c) {
        blocks.pu(i, 3 * j + c) = rw2 * n1[c] * mass(j, i);
        blocks.up(3 * i + c, j) = n1[c] * mass(j, i);
      }
    }
  }
  return blocks;
}

CouplingBlocks coupling_face(const TetMesh& mesh, const Face& face, const PhysicsConfig& physics) {
  if (face.tag != FaceTag::InterfaceGammaS) throw Error("coupling_face: face is not on Gamma_s");
  return coupling_face({mesh.vertices[face.vertices[0]], mesh.vertices[face.vertices[1]],
                        mesh.vertices[face.vertices[2]]},
                       face.normal, physics);
}

Complex evaluate_g(const Vec3& x, Region region, const Scenario& scenario,
                   const PhysicsConfig& physics, const PmlProfile& profile) {
  if (region == Region::Elastic) throw Error("evaluate_g: point lies in the elastic region");
  if (region == Region::Acoustic || scenario.mode != ScenarioMode::PlaneWavePml) return 0.0;
  const auto coef = pml_coefficients(x, profile);
  const CVec3 dA = pml_coefficient_derivatives(x, profile);
  const Complex p = scenario.pressure(x);
  const CVec3 grad = scenario.pressure_gradient(x);
  const CMat3 hess = scenario.pressure_hessian(x);
  Complex value = physics.kappa * physics.kappa * coef.b * p;
  for (int j = 0; j < 3; ++j) value += dA[j] * grad[j] + coef.A_diag[j] * hess(j, j);
  return value;
}

ComplexSparseSystem assemble(const TetMesh& mesh, const DofMap& dofs, const PhysicsConfig& physics,
                             const PmlProfile& profile, const Scenario& scenario) {
  using Triplet = Eigen::Triplet<Complex>;
  std::vector<Triplet> triplets;
  std::size_t n_el = 0;
  for (Region r : mesh.region) n_el += (r == Region::Elastic);
  triplets.reserve(16 * (mesh.num_tets() - n_el) + 144 * n_el);

  ComplexSparseSystem sys;
  sys.rhs = Eigen::VectorXcd::Zero(dofs.size());
  const bool plane_wave = scenario.mode == ScenarioMode::PlaneWavePml;

  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto& c = mesh.tets[t];
    const TetVertices v = mesh.tet_vertices(t);
    if (mesh.region[t] == Region::Elastic) {
      const ElasticMatrix M = element_elastic(v, physics);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
              triplets.emplace_back(dofs.u_dof[c[i]] + a, dofs.u_dof[c[j]] + b, M(3 * i + a, 3 * j + b));
            }
          }
        }
      }
      continue;
    }
    const AcousticMatrix M = element_acoustic(v, mesh.region[t], physics, profile);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) triplets.emplace_back(dofs.p_dof[c[i]], dofs.p_dof[c[j]], M(i, j));
    }
    if (plane_wave && mesh.region[t] == Region::Pml && profile.enabled()) {
      const double vol = tet_geometry(v).volume;
      for (const auto& q : tet_rule(4)) {
        const Complex g = evaluate_g(barycentric_point(v, q.bary), Region::Pml, scenario, physics, profile);
        for (int i = 0; i < 4; ++i) sys.rhs[dofs.p_dof[c[i]]] -= q.weight * vol * g * q.bary[i];
      }
    }
  }

  for (const Face& f : mesh.faces) {
    if (f.tag != FaceTag::InterfaceGammaS) continue;
    const CouplingBlocks blocks = coupling_face(mesh, f, physics);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int a = 0; a < 3; ++a) {
          triplets.emplace_back(dofs.p_dof[f.vertices[i]], dofs.u_dof[f.vertices[j]] + a, blocks.pu(i, 3 * j + a));
          triplets.emplace_back(dofs.u_dof[f.vertices[i]] + a, dofs.p_dof[f.vertices[j]], blocks.up(3 * i + a, j));
        }
      }
    }
    if (scenario.mode == ScenarioMode::ManufacturedDirichlet) {
      const std::array<Vec3, 3> x{mesh.vertices[f.vertices[0]], mesh.vertices[f.vertices[1]],
                                  mesh.vertices[f.vertices[2]]};
      for (const auto& q : tri_rule(4)) {
        const Vec3 xq = q.bary[0] * x[0] + q.bary[1] * x[1] + q.bary[2] * x[2];
        const double w = q.weight * f.area;
        const Complex gN = scenario.interface_normal_data(xq, f.normal);
        const CVec3 gT = scenario.interface_traction_data(xq, f.normal);
        for (int i = 0; i < 3; ++i) {
          sys.rhs[dofs.p_dof[f.vertices[i]]] -= w * gN * q.bary[i];
          sys.rhs.segment<3>(dofs.u_dof[f.vertices[i]]) -= w * q.bary[i] * gT;
        }
      }
    }
  }

  sys.matrix.resize(dofs.size(), dofs.size());
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

ComplexSparseSystem apply_dirichlet(ComplexSparseSystem system, const TetMesh& mesh,
                                    const DofMap& dofs, FaceTag tag,
                                    const std::function<Complex(const Vec3&)>& value_fn) {
  std::set<int> vertices;
  for (const Face& f : mesh.faces) {
    if (f.tag == tag) vertices.insert(f.vertices.begin(), f.vertices.end());
  }
  for (int v : vertices) {
    const int dof = dofs.p_dof[v];
    if (dof < 0) continue;
    const Complex value = value_fn(mesh.vertices[v]);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw Error("apply_dirichlet: non-finite boundary value at vertex " + std::to_string(v));
    }
    system.constrained[dof] = value;
  }

  const int n = static_cast<int>(system.matrix.rows());
  std::vector<char> is_fixed(n, 0);
  Eigen::VectorXcd fixed_value = Eigen::VectorXcd::Zero(n);
  for (const auto& [dof, value] : system.constrained) {
    is_fixed[dof] = 1;
    fixed_value[dof] = value;
  }
  using Triplet = Eigen::Triplet<Complex>;
  std::vector<Triplet> kept;
  kept.reserve(system.matrix.nonZeros());
  for (int col = 0; col < system.matrix.outerSize(); ++col) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(system.matrix, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (is_fixed[row]) continue;
      if (is_fixed[col]) {
        system.rhs[row] -= it.value() * fixed_value[col];
        continue;
      }
      kept.emplace_back(row, col, it.value());
    }
  }
  for (const auto& [dof, value] : system.constrained) {
    kept.emplace_back(dof, dof, Complex(1.0));
    system.rhs[dof] = value;
  }
  system.matrix.setZero();
  system.matrix.setFromTriplets(kept.begin(), kept.end());
  return system;
}

}  // namespace aefem
