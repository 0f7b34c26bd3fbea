#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aefem/common.hpp"

namespace aefem {

enum class Region : std::uint8_t { Elastic, Acoustic, Pml };
enum class FaceTag : std::uint8_t { None, InterfaceGammaS, PmlInnerBoundaryB, OuterGamma };

std::string to_string(Region r);
std::string to_string(FaceTag t);

/// Axis-aligned box [lo, hi].
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool contains(const Vec3& x) const {
    return (x.array() > lo.array()).all() && (x.array() < hi.array()).all();
  }
  double volume() const { return (hi - lo).prod(); }
};

/// A triangular face of the mesh.
///
/// Orientation conventions for `normal`:
///  - interior faces: points from tet2 into tet1;
///  - InterfaceGammaS: tet1 is the non-elastic side, tet2 the elastic side, so the
///    normal points out of the solid;
///  - PmlInnerBoundaryB: tet1 is the PML side, tet2 the acoustic side, so the normal
///    points out of the box B;
///  - faces on the boundary of D: tet2 == -1 and the normal points out of D.
struct Face {
  std::array<int, 3> vertices{};  // ascending vertex ids
  int tet1 = -1;
  int tet2 = -1;
  FaceTag tag = FaceTag::None;
  Vec3 normal = Vec3::Zero();
  double area = 0.0;

  bool is_boundary() const { return tet2 < 0; }
};

/// Vertex ordering and bisection tag of one tetrahedron. The refinement edge is
/// (order[0], order[tag]).
struct BisectionState {
  std::array<int, 4> order{};
  std::uint8_t tag = 3;
};

/// Conforming tetrahedral mesh with region and face classification.
///
/// `tets` are positively oriented. `faces` and `tet_faces` are derived data rebuilt by
/// classify_faces(); every operation that returns a TetMesh leaves them current.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<Region> region;
  std::vector<BisectionState> bisection;

  std::vector<Face> faces;
  std::vector<std::array<int, 4>> tet_faces;  // face index opposite local vertex i

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_tets() const { return tets.size(); }
  TetVertices tet_vertices(std::size_t t) const {
    const auto& c = tets[t];
    return {vertices[c[0]], vertices[c[1]], vertices[c[2]], vertices[c[3]]};
  }
};

/// Point-membership predicate assigning a region to each tetrahedron.
using RegionClassifier = std::function<Region(const Vec3&)>;

/// Nested-box geometry: an elastic box minus optional dents, inside the acoustic box B,
/// inside the computational box D. Points outside B are PML.
struct BoxRegions {
  Box acoustic_box;
  std::optional<Box> elastic_box;
  std::vector<Box> elastic_dents;

  Region operator()(const Vec3& x) const;
};

/// Structured Kuhn mesh (6 tets per cube) of `outer` with spacing close to `h`.
/// Throws if a tetrahedron straddles two regions of `classifier`.
TetMesh generate_box_mesh(const Box& outer, double h, const RegionClassifier& classifier);

/// Physical-group ids of a Gmsh file mapped onto regions and face tags.
struct MshPhysicalGroups {
  std::map<int, Region> volumes{{1, Region::Elastic}, {2, Region::Acoustic}, {3, Region::Pml}};
  std::map<int, FaceTag> surfaces{{11, FaceTag::InterfaceGammaS},
                                  {12, FaceTag::PmlInnerBoundaryB},
                                  {13, FaceTag::OuterGamma}};
};

/// Reads a Gmsh MSH 2.2 ASCII mesh of tetrahedra (type 4). Triangles (type 2) are
/// checked against the tags inferred from region adjacency; points and lines are
/// ignored; any other element type is rejected.
TetMesh import_msh(std::istream& in, const MshPhysicalGroups& groups = {});

struct RefineStats {
  int bisections = 0;  // edges split
  int forced = 0;      // refinement edges overridden to break a closure cycle
};

/// Newest-vertex bisection of every marked tet followed by conforming closure.
TetMesh refine(const TetMesh& mesh, std::span<const int> marked, RefineStats* stats = nullptr);

/// Rebuilds faces/tet_faces from regions and connectivity.
/// Throws on non-manifold faces or an elastic tet touching a PML tet.
void classify_faces(TetMesh& mesh);

double tet_volume(const TetMesh& mesh, std::size_t t);
double total_volume(const TetMesh& mesh);
double region_volume(const TetMesh& mesh, Region r);
double min_dihedral_angle(const TetMesh& mesh);

/// Every boundary face lies on the surface of `outer` (catches hanging nodes) and every
/// tet is positively oriented.
bool is_conforming(const TetMesh& mesh, const Box& outer, double tol = 1e-12);

std::size_t count_faces(const TetMesh& mesh, FaceTag tag);

}  // namespace aefem
