#pragma once

#include <array>

#include "aefem/common.hpp"

namespace aefem {

/// Volume and constant P1 basis gradients of one tetrahedron.
struct TetGeometry {
  double volume = 0.0;
  std::array<Vec3, 4> grad;  // gradient of the barycentric coordinate of vertex i
};

double signed_volume(const TetVertices& v);

/// Throws Error for degenerate (near-zero volume) tetrahedra.
TetGeometry tet_geometry(const TetVertices& v);

/// Longest edge length.
double tet_diameter(const TetVertices& v);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double triangle_diameter(const Vec3& a, const Vec3& b, const Vec3& c);

/// Smallest of the six interior dihedral angles, in radians.
double min_dihedral_angle(const TetVertices& v);

inline Vec3 barycentric_point(const TetVertices& v, const std::array<double, 4>& lambda) {
  return lambda[0] * v[0] + lambda[1] * v[1] + lambda[2] * v[2] + lambda[3] * v[3];
}

}  // namespace aefem
