#pragma once

#include <array>
#include <span>

namespace aefem {

/// Quadrature point in barycentric coordinates; weights are fractions of the element
/// measure and sum to one.
struct TetQuadPoint {
  std::array<double, 4> bary;
  double weight;
};

struct TriQuadPoint {
  std::array<double, 3> bary;
  double weight;
};

/// Rules exact for polynomials of the given total degree: 1 (1 point), 2 (4 points),
/// 4 (11-point Keast, one negative weight).
std::span<const TetQuadPoint> tet_rule(int degree);

/// Rules of degree 1 (1 point), 2 (3 points), 4 (6 points).
std::span<const TriQuadPoint> tri_rule(int degree);

}  // namespace aefem
