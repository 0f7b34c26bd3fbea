#include <gtest/gtest.h>

#include <random>

#include "aefem/geometry.hpp"
#include "aefem/quadrature.hpp"
#include "oracles.hpp"

using namespace aefem;

namespace {

// All monomials in barycentric coordinates of total degree <= deg.
std::vector<std::array<int, 4>> tet_exponents(int deg) {
  std::vector<std::array<int, 4>> out;
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b)
      for (int c = 0; a + b + c <= deg; ++c)
        for (int d = 0; a + b + c + d <= deg; ++d) out.push_back({a, b, c, d});
  return out;
}

}  // namespace

TEST(Quadrature, TetRulesIntegrateMonomialsExactly) {
  for (int degree : {1, 2, 4}) {
    double wsum = 0.0;
    for (const auto& q : tet_rule(degree)) wsum += q.weight;
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (const auto& e : tet_exponents(degree)) {
      double approx = 0.0;
      for (const auto& q : tet_rule(degree)) {
        double v = q.weight;
        for (int i = 0; i < 4; ++i) v *= std::pow(q.bary[i], e[i]);
        approx += v;
      }
      EXPECT_NEAR(approx, oracle::tet_monomial(e, 1.0), 1e-14) << "degree " << degree;
    }
  }
}

TEST(Quadrature, TriRulesIntegrateMonomialsExactly) {
  for (int degree : {1, 2, 4}) {
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        for (int c = 0; a + b + c <= degree; ++c) {
          double approx = 0.0;
          for (const auto& q : tri_rule(degree)) {
            approx += q.weight * std::pow(q.bary[0], a) * std::pow(q.bary[1], b) * std::pow(q.bary[2], c);
          }
          EXPECT_NEAR(approx, oracle::tri_monomial({a, b, c}, 1.0), 1e-14) << "degree " << degree;
        }
      }
    }
  }
}

TEST(Quadrature, DegreeFourFailsOnDegreeSix) {
  // Guards against a rule that is accidentally exact to higher order than claimed,
  // which would hide a wrong weight set.
  double approx = 0.0;
  for (const auto& q : tet_rule(4)) approx += q.weight * std::pow(q.bary[0], 6);
  EXPECT_GT(std::abs(approx - oracle::tet_monomial({6, 0, 0, 0}, 1.0)), 1e-6);
}

TEST(Quadrature, UnsupportedDegreeThrows) {
  EXPECT_THROW(tet_rule(3), Error);
  EXPECT_THROW(tri_rule(7), Error);
}

TEST(Geometry, ReferenceTet) {
  const TetVertices v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const TetGeometry g = tet_geometry(v);
  EXPECT_NEAR(g.volume, 1.0 / 6.0, 1e-15);
  EXPECT_TRUE(g.grad[0].isApprox(Vec3(-1, -1, -1)));
  EXPECT_TRUE(g.grad[1].isApprox(Vec3(1, 0, 0)));
  EXPECT_NEAR(tet_diameter(v), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(triangle_area(v[1], v[2], v[3]), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(Geometry, GradientsAreBarycentricDerivatives) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const TetVertices v = oracle::random_tet(rng, Vec3(0.3, -0.1, 0.2), 0.5);
    const TetGeometry g = tet_geometry(v);
    EXPECT_NEAR(g.volume, std::abs(signed_volume(v)), 1e-14);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) EXPECT_NEAR(g.grad[i].dot(v[j] - v[0]), (i == j) - (i == 0), 1e-12);
    }
  }
}

TEST(Geometry, DegenerateTetThrows) {
  const TetVertices v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
  EXPECT_THROW(tet_geometry(v), Error);
}

TEST(Geometry, RegularTetDihedralAngle) {
  const TetVertices v{Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  EXPECT_NEAR(min_dihedral_angle(v), std::acos(1.0 / 3.0), 1e-12);
}

TEST(Oracle, DuffyMatchesMonomialFormula) {
  std::mt19937_64 rng(3);
  const TetVertices v = oracle::random_tet(rng, Vec3::Zero(), 1.0);
  const double vol = tet_geometry(v).volume;
  const double approx = oracle::duffy_tet<double>(
      v, 8, [](const std::array<double, 4>& l, const Vec3&) { return l[0] * l[0] * l[1] * l[3] * l[3] * l[3]; });
  EXPECT_NEAR(approx, oracle::tet_monomial({2, 1, 0, 3}, vol), 1e-15);
}
