#include "aefem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aefem {

double signed_volume(const TetVertices& v) {
  Mat3 J;
  J.col(0) = v[1] - v[0];
  J.col(1) = v[2] - v[0];
  J.col(2) = v[3] - v[0];
  return J.determinant() / 6.0;
}

TetGeometry tet_geometry(const TetVertices& v) {
  Mat3 J;
  J.col(0) = v[1] - v[0];
  J.col(1) = v[2] - v[0];
  J.col(2) = v[3] - v[0];
  const double det = J.determinant();
  const double scale = std::pow(tet_diameter(v), 3);
  if (!(std::abs(det) > 1e-14 * scale)) {
    throw Error("degenerate tetrahedron (volume " + std::to_string(det / 6.0) + ")");
  }
  const Mat3 inv = J.inverse();
  TetGeometry g;
  g.volume = std::abs(det) / 6.0;
  g.grad[1] = inv.row(0).transpose();
  g.grad[2] = inv.row(1).transpose();
  g.grad[3] = inv.row(2).transpose();
  g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
  return g;
}

double tet_diameter(const TetVertices& v) {
  double h = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) h = std::max(h, (v[i] - v[j]).norm());
  }
  return h;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double triangle_diameter(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

double min_dihedral_angle(const TetVertices& v) {
  // Angle along edge (i,j) between the faces (i,j,k) and (i,j,l).
  constexpr int kEdges[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2},
                                {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : kEdges) {
    const Vec3 axis = (v[e[1]] - v[e[0]]).normalized();
    Vec3 a = v[e[2]] - v[e[0]];
    Vec3 b = v[e[3]] - v[e[0]];
    a -= a.dot(axis) * axis;
    b -= b.dot(axis) * axis;
    const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
    best = std::min(best, std::acos(c));
  }
  return best;
}

}  // namespace aefem
