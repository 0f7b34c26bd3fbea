#include "aefem/quadrature.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "aefem/common.hpp"

namespace aefem {

namespace {

std::vector<TetQuadPoint> make_tet_rules(int degree) {
  std::vector<TetQuadPoint> r;
  switch (degree) {
    case 1:
      r.push_back({{0.25, 0.25, 0.25, 0.25}, 1.0});
      break;
    case 2: {
      const double a = 0.5854101966249685;
      const double b = 0.1381966011250105;
      for (int i = 0; i < 4; ++i) {
        std::array<double, 4> l{b, b, b, b};
        l[i] = a;
        r.push_back({l, 0.25});
      }
      break;
    }
    case 4: {
      r.push_back({{0.25, 0.25, 0.25, 0.25}, -444.0 / 5625.0});
      for (int i = 0; i < 4; ++i) {
        std::array<double, 4> l{1.0 / 14, 1.0 / 14, 1.0 / 14, 1.0 / 14};
        l[i] = 11.0 / 14;
        r.push_back({l, 2058.0 / 45000.0});
      }
      const double a = 0.25 * (1.0 + std::sqrt(5.0 / 14.0));
      const double b = 0.25 * (1.0 - std::sqrt(5.0 / 14.0));
      constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
      for (const auto& p : kPairs) {
        std::array<double, 4> l{b, b, b, b};
        l[p[0]] = a;
        l[p[1]] = a;
        r.push_back({l, 336.0 / 2250.0});
      }
      break;
    }
    default:
      throw Error("tet_rule: unsupported degree " + std::to_string(degree));
  }
  return r;
}

std::vector<TriQuadPoint> make_tri_rules(int degree) {
  std::vector<TriQuadPoint> r;
  const auto orbit = [&](double a, double w) {
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> l{a, a, a};
      l[i] = 1.0 - 2.0 * a;
      r.push_back({l, w});
    }
  };
  switch (degree) {
    case 1:
      r.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0});
      break;
    case 2:
      orbit(1.0 / 6, 1.0 / 3);
      break;
    case 4:
      orbit(0.445948490915965, 0.223381589678011);
      orbit(0.091576213509771, 0.109951743655322);
      break;
    default:
      throw Error("tri_rule: unsupported degree " + std::to_string(degree));
  }
  return r;
}

}  // namespace

std::span<const TetQuadPoint> tet_rule(int degree) {
  static const std::vector<TetQuadPoint> d1 = make_tet_rules(1);
  static const std::vector<TetQuadPoint> d2 = make_tet_rules(2);
  static const std::vector<TetQuadPoint> d4 = make_tet_rules(4);
  switch (degree) {
    case 1: return d1;
    case 2: return d2;
    case 4: return d4;
    default: throw Error("tet_rule: unsupported degree " + std::to_string(degree));
  }
}

std::span<const TriQuadPoint> tri_rule(int degree) {
  static const std::vector<TriQuadPoint> d1 = make_tri_rules(1);
  static const std::vector<TriQuadPoint> d2 = make_tri_rules(2);
  static const std::vector<TriQuadPoint> d4 = make_tri_rules(4);
  switch (degree) {
    case 1: return d1;
    case 2: return d2;
    case 4: return d4;
    default: throw Error("tri_rule: unsupported degree " + std::to_string(degree));
  }
}

}  // namespace aefem
