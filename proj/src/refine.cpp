// Newest-vertex bisection in Maubach's tagged form. A tet with vertex order
// (x0, x1, x2, x3) and tag k is bisected at edge (x0, xk). Conformity is maintained by
// splitting every tet around an edge at once; neighbours whose refinement edge differs
// are refined first, recursively.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "aefem/geometry.hpp"
#include "aefem/mesh.hpp"

namespace aefem {

namespace {

using EdgeKey = std::uint64_t;

EdgeKey edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

class Refiner {
 public:
  explicit Refiner(const TetMesh& mesh) : mesh_(mesh), generation_(mesh.num_tets(), 0) {
    for (std::size_t t = 0; t < mesh_.num_tets(); ++t) attach(static_cast<int>(t));
  }

  void refine_marked(std::span<const int> marked) {
    std::vector<std::pair<int, int>> todo;
    todo.reserve(marked.size());
    for (int t : marked) todo.emplace_back(t, generation_[t]);
    std::sort(todo.begin(), todo.end());
    for (const auto& [t, gen] : todo) {
      if (generation_[t] != gen) continue;  // already bisected by an earlier closure
      bisect_edge(refinement_edge(t), 0);
    }
  }

  const RefineStats& stats() const { return stats_; }

  TetMesh take() {
    classify_faces(mesh_);
    return std::move(mesh_);
  }

 private:
  static constexpr int kMaxDepth = 200;

  EdgeKey refinement_edge(int t) const {
    const auto& bs = mesh_.bisection[t];
    return edge_key(bs.order[0], bs.order[bs.tag]);
  }

  void attach(int t) {
    const auto& c = mesh_.tets[t];
    for (const auto& e : kLocalEdges) edge_tets_[edge_key(c[e[0]], c[e[1]])].push_back(t);
  }

  void detach(int t) {
    const auto& c = mesh_.tets[t];
    for (const auto& e : kLocalEdges) {
      auto it = edge_tets_.find(edge_key(c[e[0]], c[e[1]]));
      auto& list = it->second;
      list.erase(std::find(list.begin(), list.end(), t));
      if (list.empty()) edge_tets_.erase(it);
    }
  }

  void bisect_edge(EdgeKey e, int depth) {
    in_progress_.insert(e);
    for (;;) {
      const std::vector<int> patch = edge_tets_.at(e);
      bool ready = true;
      for (int t : patch) {
        const EdgeKey r = refinement_edge(t);
        if (r == e) continue;
        ready = false;
        if (depth >= kMaxDepth || in_progress_.count(r) != 0) {
          force_refinement_edge(t, e);
        } else {
          bisect_edge(r, depth + 1);
        }
        break;
      }
      if (ready) {
        split(e, patch);
        break;
      }
    }
    in_progress_.erase(e);
  }

  // Incompatible initial meshes can cycle; the tet is then bisected at `e` directly.
  void force_refinement_edge(int t, EdgeKey e) {
    ++stats_.forced;
    const int a = static_cast<int>(e >> 32);
    const int b = static_cast<int>(e & 0xffffffffu);
    std::array<int, 2> rest{};
    int n = 0;
    for (int v : mesh_.tets[t]) {
      if (v != a && v != b) rest[n++] = v;
    }
    std::sort(rest.begin(), rest.end());
    mesh_.bisection[t] = {{a, rest[0], rest[1], b}, 3};
  }

  void split(EdgeKey e, const std::vector<int>& patch) {
    const int a = static_cast<int>(e >> 32);
    const int b = static_cast<int>(e & 0xffffffffu);
    const int z = static_cast<int>(mesh_.vertices.size());
    mesh_.vertices.push_back(0.5 * (mesh_.vertices[a] + mesh_.vertices[b]));
    ++stats_.bisections;

    for (int t : patch) {
      const BisectionState parent = mesh_.bisection[t];
      const int k = parent.tag;
      const auto& x = parent.order;
      BisectionState c1;
      BisectionState c2;
      for (int i = 0; i < 4; ++i) c1.order[i] = (i == k) ? z : x[i];
      for (int i = 0; i < k; ++i) c2.order[i] = x[i + 1];
      c2.order[k] = z;
      for (int i = k + 1; i < 4; ++i) c2.order[i] = x[i];
      c1.tag = c2.tag = static_cast<std::uint8_t>(k > 1 ? k - 1 : 3);

      detach(t);
      const int t2 = static_cast<int>(mesh_.tets.size());
      mesh_.tets.push_back({});
      mesh_.region.push_back(mesh_.region[t]);
      mesh_.bisection.push_back(c2);
      generation_.push_back(generation_[t] + 1);
      mesh_.bisection[t] = c1;
      ++generation_[t];
      mesh_.tets[t] = oriented(c1.order);
      mesh_.tets[t2] = oriented(c2.order);
      attach(t);
      attach(t2);
    }
  }

  std::array<int, 4> oriented(std::array<int, 4> c) const {
    const TetVertices v{mesh_.vertices[c[0]], mesh_.vertices[c[1]], mesh_.vertices[c[2]],
                        mesh_.vertices[c[3]]};
    if (signed_volume(v) < 0.0) std::swap(c[1], c[2]);
    return c;
  }

  TetMesh mesh_;
  std::vector<int> generation_;
  std::unordered_map<EdgeKey, std::vector<int>> edge_tets_;
  std::unordered_set<EdgeKey> in_progress_;
  RefineStats stats_;
};

}  // namespace

TetMesh refine(const TetMesh& mesh, std::span<const int> marked, RefineStats* stats) {
  if (stats) *stats = {};
  for (int t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_tets()) {
      throw Error("refine: marked tet index " + std::to_string(t) + " out of range");
    }
  }
  if (marked.empty() || mesh.num_tets() == 0) return mesh;
  Refiner refiner(mesh);
  refiner.refine_marked(marked);
  if (stats) *stats = refiner.stats();
  return refiner.take();
}

}  // namespace aefem
