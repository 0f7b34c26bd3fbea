#include "aefem/vtk.hpp"

#include <iomanip>
#include <limits>

namespace aefem {

namespace {

constexpr int kVtkTetra = 10;

int region_code(Region r) {
  switch (r) {
    case Region::Elastic: return 0;
    case Region::Acoustic: return 1;
    case Region::Pml: return 2;
  }
  return -1;
}

template <typename T>
T expect(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw Error(std::string("read_vtk: expected ") + what);
  return v;
}

void expect_word(std::istream& in, const std::string& word) {
  const auto w = expect<std::string>(in, word.c_str());
  if (w != word) throw Error("read_vtk: expected " + word + ", found " + w);
}

}  // namespace

void write_vtk(std::ostream& out, const TetMesh& mesh, const FieldPair& fields, const std::string& title) {
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.num_tets();
  if (fields.p.size() != nv || fields.u.size() != nv) throw Error("write_vtk: field size does not match mesh");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec3& x : mesh.vertices) out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  out << "CELLS " << nt << ' ' << 5 * nt << '\n';
  for (const auto& t : mesh.tets) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) out << kVtkTetra << '\n';
  out << "CELL_DATA " << nt << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (Region r : mesh.region) out << region_code(r) << '\n';

  out << "POINT_DATA " << nv << '\n';
  const auto scalar = [&](const char* name, auto fn) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const Complex& p : fields.p) out << fn(p) << '\n';
  };
  scalar("p_re", [](const Complex& p) { return p.real(); });
  scalar("p_im", [](const Complex& p) { return p.imag(); });
  scalar("p_abs", [](const Complex& p) { return std::abs(p); });
  const auto vector = [&](const char* name, auto fn) {
    out << "VECTORS " << name << " double\n";
    for (const CVec3& u : fields.u) {
      const Vec3 v = fn(u);
      out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
  };
  vector("u_re", [](const CVec3& u) { return Vec3(u.real()); });
  vector("u_im", [](const CVec3& u) { return Vec3(u.imag()); });
  if (!out) throw Error("write_vtk: write failed");
}

VtkGrid read_vtk(std::istream& in) {
  VtkGrid g;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile Version", 0) != 0) {
    throw Error("read_vtk: missing header line");
  }
  if (!std::getline(in, g.title)) throw Error("read_vtk: missing title");
  expect_word(in, "ASCII");
  expect_word(in, "DATASET");
  expect_word(in, "UNSTRUCTURED_GRID");

  std::string section;
  std::size_t data_count = 0;
  bool in_point_data = false;
  while (in >> section) {
    if (section == "POINTS") {
      const auto n = expect<std::size_t>(in, "point count");
      expect<std::string>(in, "point type");
      g.points.resize(n);
      for (auto& p : g.points) {
        for (int i = 0; i < 3; ++i) p[i] = expect<double>(in, "coordinate");
      }
    } else if (section == "CELLS") {
      const auto n = expect<std::size_t>(in, "cell count");
      const auto total = expect<std::size_t>(in, "cell list size");
      std::size_t read = 0;
      g.cells.resize(n);
      for (auto& c : g.cells) {
        const auto k = expect<int>(in, "cell size");
        c.resize(k);
        for (int& v : c) v = expect<int>(in, "cell vertex");
        read += k + 1;
      }
      if (read != total) throw Error("read_vtk: CELLS size mismatch");
    } else if (section == "CELL_TYPES") {
      g.cell_types.resize(expect<std::size_t>(in, "cell type count"));
      for (int& t : g.cell_types) t = expect<int>(in, "cell type");
    } else if (section == "CELL_DATA" || section == "POINT_DATA") {
      data_count = expect<std::size_t>(in, "data count");
      in_point_data = section == "POINT_DATA";
    } else if (section == "SCALARS") {
      const auto name = expect<std::string>(in, "array name");
      expect<std::string>(in, "array type");
      std::getline(in, line);  // optional component count
      expect_word(in, "LOOKUP_TABLE");
      expect<std::string>(in, "table name");
      std::vector<double> values(data_count);
      for (double& v : values) v = expect<double>(in, "scalar value");
      (in_point_data ? g.point_scalars : g.cell_scalars)[name] = std::move(values);
    } else if (section == "VECTORS") {
      const auto name = expect<std::string>(in, "array name");
      expect<std::string>(in, "array type");
      if (!in_point_data) throw Error("read_vtk: cell vectors are not supported");
      std::vector<Vec3> values(data_count);
      for (Vec3& v : values) {
        for (int i = 0; i < 3; ++i) v[i] = expect<double>(in, "vector component");
      }
      g.point_vectors[name] = std::move(values);
    } else {
      throw Error("read_vtk: unsupported section " + section);
    }
  }
  if (g.cells.size() != g.cell_types.size()) throw Error("read_vtk: CELLS and CELL_TYPES disagree");
  for (const auto& c : g.cells) {
    for (int v : c) {
      if (v < 0 || static_cast<std::size_t>(v) >= g.points.size()) throw Error("read_vtk: cell vertex out of range");
    }
  }
  return g;
}

}  // namespace aefem
