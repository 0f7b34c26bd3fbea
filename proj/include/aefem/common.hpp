#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace aefem {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

/// Four vertex positions of a tetrahedron, in the order used by its connectivity.
using TetVertices = std::array<Vec3, 4>;

/// Raised for invalid input, violated preconditions and failed runs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Complex kI{0.0, 1.0};

}  // namespace aefem
