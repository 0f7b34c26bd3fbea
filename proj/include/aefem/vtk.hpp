#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "aefem/assembly.hpp"

namespace aefem {

/// Legacy ASCII 3.0 unstructured grid with POINT_DATA p_re, p_im, p_abs (scalars) and
/// u_re, u_im (vectors), plus CELL_DATA region (0 elastic, 1 acoustic, 2 PML).
/// Fields are zero at points outside their region.
void write_vtk(std::ostream& out, const TetMesh& mesh, const FieldPair& fields,
               const std::string& title = "aefem fields");

/// Contents of a legacy ASCII unstructured grid restricted to what write_vtk emits.
struct VtkGrid {
  std::string title;
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> point_scalars;
  std::map<std::string, std::vector<Vec3>> point_vectors;
  std::map<std::string, std::vector<double>> cell_scalars;
};

VtkGrid read_vtk(std::istream& in);

}  // namespace aefem
