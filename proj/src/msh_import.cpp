#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "aefem/geometry.hpp"
#include "aefem/mesh.hpp"

namespace aefem {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::string expect_line(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("import_msh: line " + std::to_string(number_) + ": " + msg);
  }

  int line_number() const { return number_; }

 private:
  std::istream& in_;
  int number_ = 0;
};

struct RawTriangle {
  std::array<int, 3> nodes;
  int physical;
  int line;
};

// Longest edge becomes the first refinement edge; ties broken by vertex ids.
void init_longest_edge_bisection(TetMesh& mesh) {
  constexpr int kEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  mesh.bisection.resize(mesh.num_tets());
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto& c = mesh.tets[t];
    std::tuple<double, int, int> best{-1.0, 0, 0};
    for (const auto& e : kEdges) {
      const int a = std::min(c[e[0]], c[e[1]]);
      const int b = std::max(c[e[0]], c[e[1]]);
      const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
      const std::tuple<double, int, int> cand{len, -a, -b};
      if (cand > best) best = cand;
    }
    const int a = -std::get<1>(best);
    const int b = -std::get<2>(best);
    std::array<int, 2> rest{};
    int n = 0;
    for (int v : c) {
      if (v != a && v != b) rest[n++] = v;
    }
    std::sort(rest.begin(), rest.end());
    mesh.bisection[t] = {{a, rest[0], rest[1], b}, 3};
  }
}

}  // namespace

TetMesh import_msh(std::istream& in, const MshPhysicalGroups& groups) {
  LineReader reader(in);
  std::string line;
  bool have_format = false;
  std::map<long, int> node_index;
  TetMesh mesh;
  std::vector<RawTriangle> triangles;

  while (reader.next(line)) {
    if (line == "$MeshFormat") {
      std::istringstream ls(reader.expect_line("format line"));
      double version = 0.0;
      int file_type = -1;
      ls >> version >> file_type;
      if (!ls || version < 2.0 || version >= 3.0) reader.fail("only MSH 2.x is supported");
      if (file_type != 0) reader.fail("binary MSH files are not supported");
      if (reader.expect_line("$EndMeshFormat") != "$EndMeshFormat") reader.fail("expected $EndMeshFormat");
      have_format = true;
    } else if (line == "$Nodes") {
      long count = 0;
      if (!(std::istringstream(reader.expect_line("node count")) >> count) || count < 0) {
        reader.fail("bad node count");
      }
      mesh.vertices.reserve(static_cast<std::size_t>(count));
      for (long i = 0; i < count; ++i) {
        std::istringstream ls(reader.expect_line("node"));
        long id = 0;
        Vec3 x;
        if (!(ls >> id >> x[0] >> x[1] >> x[2])) reader.fail("malformed node line");
        if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second) {
          reader.fail("duplicate node id " + std::to_string(id));
        }
        mesh.vertices.push_back(x);
      }
      if (reader.expect_line("$EndNodes") != "$EndNodes") reader.fail("expected $EndNodes");
    } else if (line == "$Elements") {
      long count = 0;
      if (!(std::istringstream(reader.expect_line("element count")) >> count) || count < 0) {
        reader.fail("bad element count");
      }
      for (long i = 0; i < count; ++i) {
        std::istringstream ls(reader.expect_line("element"));
        long id = 0;
        int type = 0;
        int ntags = 0;
        if (!(ls >> id >> type >> ntags) || ntags < 0) reader.fail("malformed element line");
        std::vector<int> tags(static_cast<std::size_t>(ntags));
        for (int& tag : tags) {
          if (!(ls >> tag)) reader.fail("malformed element tags");
        }
        const int physical = ntags > 0 ? tags[0] : 0;
        const auto read_nodes = [&](int n) {
          std::vector<int> nodes(static_cast<std::size_t>(n));
          for (int& v : nodes) {
            long nid = 0;
            if (!(ls >> nid)) reader.fail("element " + std::to_string(id) + ": missing node");
            auto it = node_index.find(nid);
            if (it == node_index.end()) {
              reader.fail("element " + std::to_string(id) + ": unknown node " + std::to_string(nid));
            }
            v = it->second;
          }
          return nodes;
        };
        if (type == 4) {
          const auto nodes = read_nodes(4);
          auto it = groups.volumes.find(physical);
          if (it == groups.volumes.end()) {
            reader.fail("element " + std::to_string(id) + ": physical group " +
                        std::to_string(physical) + " is not mapped to a region");
          }
          std::array<int, 4> tet{nodes[0], nodes[1], nodes[2], nodes[3]};
          TetVertices tv{mesh.vertices[tet[0]], mesh.vertices[tet[1]], mesh.vertices[tet[2]],
                         mesh.vertices[tet[3]]};
          const double vol = signed_volume(tv);
          if (std::abs(vol) <= 1e-14 * std::pow(tet_diameter(tv), 3)) {
            reader.fail("element " + std::to_string(id) + ": degenerate tetrahedron");
          }
          if (vol < 0.0) std::swap(tet[1], tet[2]);
          mesh.tets.push_back(tet);
          mesh.region.push_back(it->second);
        } else if (type == 2) {
          const auto nodes = read_nodes(3);
          triangles.push_back({{nodes[0], nodes[1], nodes[2]}, physical, reader.line_number()});
        } else if (type == 15 || type == 1) {
          // points and lines carry no volume or face information
        } else {
          reader.fail("element " + std::to_string(id) + ": unsupported element type " +
                      std::to_string(type));
        }
      }
      if (reader.expect_line("$EndElements") != "$EndElements") reader.fail("expected $EndElements");
    } else if (!line.empty() && line[0] == '$' && line.rfind("$End", 0) != 0) {
      // skip unknown sections such as $PhysicalNames
      const std::string end = "$End" + line.substr(1);
      std::string inner;
      bool closed = false;
      while (reader.next(inner)) {
        if (inner == end) {
          closed = true;
          break;
        }
      }
      if (!closed) reader.fail("unterminated section " + line);
    } else {
      reader.fail("unexpected content '" + line + "'");
    }
  }
  if (!have_format) throw Error("import_msh: missing $MeshFormat section");
  if (mesh.tets.empty()) throw Error("import_msh: no tetrahedra found");

  init_longest_edge_bisection(mesh);
  classify_faces(mesh);

  std::map<std::array<int, 3>, int> face_lookup;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) face_lookup.emplace(mesh.faces[f].vertices, static_cast<int>(f));
  for (const auto& tri : triangles) {
    auto key = tri.nodes;
    std::sort(key.begin(), key.end());
    auto it = face_lookup.find(key);
    if (it == face_lookup.end()) {
      throw Error("import_msh: line " + std::to_string(tri.line) +
                  ": triangle is not a face of any tetrahedron (non-conforming input)");
    }
    auto tag = groups.surfaces.find(tri.physical);
    if (tag == groups.surfaces.end()) continue;  // unmapped surface groups are informational
    const FaceTag inferred = mesh.faces[it->second].tag;
    if (inferred != tag->second) {
      throw Error("import_msh: line " + std::to_string(tri.line) + ": triangle tagged " +
                  to_string(tag->second) + " but region adjacency implies " + to_string(inferred));
    }
  }
  return mesh;
}

}  // namespace aefem
