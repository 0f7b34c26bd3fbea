#include "aefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "aefem/geometry.hpp"

namespace aefem {

std::string to_string(Region r) {
  switch (r) {
    case Region::Elastic: return "Elastic";
    case Region::Acoustic: return "Acoustic";
    case Region::Pml: return "Pml";
  }
  return "?";
}

std::string to_string(FaceTag t) {
  switch (t) {
    case FaceTag::None: return "None";
    case FaceTag::InterfaceGammaS: return "InterfaceGammaS";
    case FaceTag::PmlInnerBoundaryB: return "PmlInnerBoundaryB";
    case FaceTag::OuterGamma: return "OuterGamma";
  }
  return "?";
}

Region BoxRegions::operator()(const Vec3& x) const {
  if (elastic_box && elastic_box->contains(x)) {
    const bool dented = std::any_of(elastic_dents.begin(), elastic_dents.end(),
                                    [&](const Box& b) { return b.contains(x); });
    if (!dented) return Region::Elastic;
  }
  return acoustic_box.contains(x) ? Region::Acoustic : Region::Pml;
}

namespace {

std::string format_point(const Vec3& x) {
  std::ostringstream os;
  os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ")";
  return os.str();
}

}  // namespace

TetMesh generate_box_mesh(const Box& outer, double h, const RegionClassifier& classifier) {
  if (!(h > 0.0)) throw Error("generate_box_mesh: h must be positive");
  const Vec3 extent = outer.hi - outer.lo;
  if (!((extent.array() > 0.0).all())) {
    throw Error("generate_box_mesh: outer box has non-positive extent");
  }
  std::array<int, 3> n{};
  for (int a = 0; a < 3; ++a) n[a] = std::max(1, static_cast<int>(std::lround(extent[a] / h)));

  TetMesh mesh;
  const auto vid = [&](int i, int j, int k) { return i + (n[0] + 1) * (j + (n[1] + 1) * k); };
  mesh.vertices.reserve(static_cast<std::size_t>((n[0] + 1) * (n[1] + 1) * (n[2] + 1)));
  for (int k = 0; k <= n[2]; ++k) {
    for (int j = 0; j <= n[1]; ++j) {
      for (int i = 0; i <= n[0]; ++i) {
        const Vec3 frac(double(i) / n[0], double(j) / n[1], double(k) / n[2]);
        Vec3 x = outer.lo + (frac.array() * extent.array()).matrix();
        if (i == n[0]) x[0] = outer.hi[0];
        if (j == n[1]) x[1] = outer.hi[1];
        if (k == n[2]) x[2] = outer.hi[2];
        mesh.vertices.push_back(x);
      }
    }
  }

  constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const std::size_t ncubes = std::size_t(n[0]) * n[1] * n[2];
  mesh.tets.reserve(6 * ncubes);
  mesh.region.reserve(6 * ncubes);
  mesh.bisection.reserve(6 * ncubes);
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        for (const auto& perm : kPerms) {
          std::array<int, 3> c{i, j, k};
          BisectionState bs;
          bs.order[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            bs.order[s + 1] = vid(c[0], c[1], c[2]);
          }
          bs.tag = 3;
          std::array<int, 4> tet = bs.order;
          TetVertices tv{mesh.vertices[tet[0]], mesh.vertices[tet[1]], mesh.vertices[tet[2]],
                         mesh.vertices[tet[3]]};
          if (signed_volume(tv) < 0.0) {
            std::swap(tet[1], tet[2]);
            std::swap(tv[1], tv[2]);
          }
          const Vec3 bary = 0.25 * (tv[0] + tv[1] + tv[2] + tv[3]);
          const Region r = classifier(bary);
          for (const auto& v : tv) {
            // Vertices sit on region interfaces; probe just inside the tet instead.
            const Vec3 probe = bary + (1.0 - 1e-6) * (v - bary);
            if (classifier(probe) != r) {
              throw Error("generate_box_mesh: tet " + std::to_string(mesh.tets.size()) +
                          " with barycenter " + format_point(bary) +
                          " straddles a region interface (classifier not aligned with h)");
            }
          }
          mesh.tets.push_back(tet);
          mesh.region.push_back(r);
          mesh.bisection.push_back(bs);
        }
      }
    }
  }
  classify_faces(mesh);
  return mesh;
}

void classify_faces(TetMesh& mesh) {
  constexpr int kFaceLocal[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  struct Entry {
    std::array<int, 3> key;
    int tet;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(4 * mesh.tets.size());
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> key{mesh.tets[t][kFaceLocal[f][0]], mesh.tets[t][kFaceLocal[f][1]],
                             mesh.tets[t][kFaceLocal[f][2]]};
      std::sort(key.begin(), key.end());
      entries.push_back({key, static_cast<int>(t), f});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.key, a.tet) < std::tie(b.key, b.tet);
  });

  mesh.faces.clear();
  mesh.tet_faces.assign(mesh.tets.size(), {-1, -1, -1, -1});
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) {
      throw Error("classify_faces: face shared by " + std::to_string(j - i) +
                  " tets (non-conforming mesh) at vertex " +
                  format_point(mesh.vertices[entries[i].key[0]]));
    }
    Face face;
    face.vertices = entries[i].key;
    int opposite_local = -1;  // local vertex of the tet the normal must point away from
    int opposite_tet = -1;
    if (j - i == 1) {
      face.tet1 = entries[i].tet;
      face.tag = FaceTag::OuterGamma;
      opposite_tet = face.tet1;
      opposite_local = entries[i].local;
    } else {
      const Entry& a = entries[i];
      const Entry& b = entries[i + 1];
      const Region ra = mesh.region[a.tet];
      const Region rb = mesh.region[b.tet];
      const Entry* first = &a;
      const Entry* second = &b;
      if ((ra == Region::Elastic) != (rb == Region::Elastic)) {
        if (ra == Region::Pml || rb == Region::Pml) {
          throw Error("classify_faces: elastic tet touches a PML tet near " +
                      format_point(mesh.vertices[a.key[0]]));
        }
        face.tag = FaceTag::InterfaceGammaS;
        if (ra == Region::Elastic) std::swap(first, second);
      } else if ((ra == Region::Acoustic && rb == Region::Pml) ||
                 (ra == Region::Pml && rb == Region::Acoustic)) {
        face.tag = FaceTag::PmlInnerBoundaryB;
        if (ra == Region::Acoustic) std::swap(first, second);
      }
      face.tet1 = first->tet;
      face.tet2 = second->tet;
      opposite_tet = face.tet2;
      opposite_local = second->local;
    }
    const Vec3& p0 = mesh.vertices[face.vertices[0]];
    const Vec3& p1 = mesh.vertices[face.vertices[1]];
    const Vec3& p2 = mesh.vertices[face.vertices[2]];
    Vec3 n = (p1 - p0).cross(p2 - p0);
    face.area = 0.5 * n.norm();
    n.normalize();
    const Vec3& away = mesh.vertices[mesh.tets[opposite_tet][opposite_local]];
    if (n.dot(away - p0) > 0.0) n = -n;
    face.normal = n;

    const int fid = static_cast<int>(mesh.faces.size());
    for (std::size_t e = i; e < j; ++e) mesh.tet_faces[entries[e].tet][entries[e].local] = fid;
    mesh.faces.push_back(face);
    i = j;
  }
}

double tet_volume(const TetMesh& mesh, std::size_t t) {
  return signed_volume(mesh.tet_vertices(t));
}

double total_volume(const TetMesh& mesh) {
  double v = 0.0;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) v += tet_volume(mesh, t);
  return v;
}

double region_volume(const TetMesh& mesh, Region r) {
  double v = 0.0;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    if (mesh.region[t] == r) v += tet_volume(mesh, t);
  }
  return v;
}

double min_dihedral_angle(const TetMesh& mesh) {
  double best = M_PI;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    best = std::min(best, min_dihedral_angle(mesh.tet_vertices(t)));
  }
  return best;
}

bool is_conforming(const TetMesh& mesh, const Box& outer, double tol) {
  const double scale = (outer.hi - outer.lo).maxCoeff();
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    if (!(tet_volume(mesh, t) > 0.0)) return false;
  }
  for (const Face& f : mesh.faces) {
    if (!f.is_boundary()) continue;
    bool on_plane = false;
    for (int a = 0; a < 3 && !on_plane; ++a) {
      for (double plane : {outer.lo[a], outer.hi[a]}) {
        bool all = true;
        for (int v : f.vertices) all = all && std::abs(mesh.vertices[v][a] - plane) <= tol * scale;
        on_plane = on_plane || all;
      }
    }
    if (!on_plane) return false;
  }
  return true;
}

std::size_t count_faces(const TetMesh& mesh, FaceTag tag) {
  return static_cast<std::size_t>(
      std::count_if(mesh.faces.begin(), mesh.faces.end(), [&](const Face& f) { return f.tag == tag; }));
}

}  // namespace aefem
