#pragma once

#include "aefem/mesh.hpp"
#include "aefem/materials.hpp"

namespace fixtures {

using namespace aefem;

inline Box cube(double lo, double hi) { return {Vec3::Constant(lo), Vec3::Constant(hi)}; }

/// [-0.3, 0.3]^3 with an elastic core [-0.1, 0.1]^3, no PML.
inline TetMesh coupled_mesh(double h = 0.1) {
  BoxRegions r;
  r.acoustic_box = cube(-0.3, 0.3);
  r.elastic_box = cube(-0.1, 0.1);
  return generate_box_mesh(cube(-0.3, 0.3), h, r);
}

/// Example 2 geometry at spacing h (h must divide 0.1).
inline BoxRegions example2_regions() {
  BoxRegions r;
  r.acoustic_box = cube(-0.6, 0.6);
  r.elastic_box = cube(-0.2, 0.2);
  r.elastic_dents = {{Vec3(-0.1, -0.1, -0.2), Vec3(0.1, 0.1, 0.0)}};
  return r;
}

inline PmlProfile example2_profile() {
  PmlProfile p;
  p.L = {0.6, 0.6, 0.6};
  p.d = {0.4, 0.4, 0.4};
  p.sigma0 = 16.0;
  p.m = 2;
  return p;
}

inline PhysicsConfig example1_physics() { return {1.0, 1.0, 0.5, 0.25, 1.0}; }
inline PhysicsConfig example2_physics() { return {2.0, 2.0 * M_PI, 1.0, 2.0, 1.0}; }

/// Smaller PML geometry: D = [-0.5, 0.5]^3, B = [-0.3, 0.3]^3, solid [-0.1, 0.1]^3.
inline TetMesh small_pml_mesh(double h = 0.1) {
  BoxRegions r;
  r.acoustic_box = cube(-0.3, 0.3);
  r.elastic_box = cube(-0.1, 0.1);
  return generate_box_mesh(cube(-0.5, 0.5), h, r);
}

inline PmlProfile small_pml_profile() {
  PmlProfile p;
  p.L = {0.3, 0.3, 0.3};
  p.d = {0.2, 0.2, 0.2};
  p.sigma0 = 10.0;
  p.m = 2;
  return p;
}

}  // namespace fixtures
