#include "aefem/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aefem/scenarios.hpp"

namespace aefem {

using nlohmann::json;

ConfigError::ConfigError(const std::string& name, int line, const std::string& message)
    : Error(name + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Position of `"key"` followed by a colon, searching from `from`.
std::size_t find_key(const std::string& text, const std::string& key, std::size_t from) {
  const std::string quoted = "\"" + key + "\"";
  for (std::size_t pos = text.find(quoted, from); pos != std::string::npos;
       pos = text.find(quoted, pos + 1)) {
    std::size_t k = pos + quoted.size();
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') return pos;
  }
  return std::string::npos;
}

std::string join(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& p : path) {
    if (!s.empty() && p.front() != '[') s += '.';
    s += p;
  }
  return s;
}

// Walks a parsed document while remembering key paths, so that every validation error
// can be reported at the line of the offending key.
class Reader {
 public:
  Reader(const std::string& text, std::string name) : text_(text), name_(std::move(name)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::size_t pos = 0;
    std::size_t found = std::string::npos;
    for (const auto& key : path) {
      if (key.front() == '[') continue;
      const std::size_t p = find_key(text_, key, pos);
      if (p == std::string::npos) break;
      found = pos = p;
    }
    const int line = found == std::string::npos ? 1 : line_of_offset(text_, found);
    throw ConfigError(name_, line, path.empty() ? message : join(path) + ": " + message);
  }

  void check_object(const json& j, const std::vector<std::string>& path,
                    const std::set<std::string>& allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) {
        auto p = path;
        p.push_back(key);
        fail(p, "unknown key");
      }
    }
  }

  double number(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  long integer(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
  }

  Vec3 vec3(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_array() || j.size() != 3) fail(path, "expected an array of three numbers");
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = number(j[i], path);
    return v;
  }

  Box box(const json& j, const std::vector<std::string>& path) const {
    check_object(j, path, {"lo", "hi"});
    if (!j.contains("lo") || !j.contains("hi")) fail(path, "box needs \"lo\" and \"hi\"");
    Box b{vec3(j["lo"], with(path, "lo")), vec3(j["hi"], with(path, "hi"))};
    if (!(b.hi.array() > b.lo.array()).all()) fail(path, "box needs lo < hi in every axis");
    return b;
  }

  static std::vector<std::string> with(std::vector<std::string> path, const std::string& key) {
    path.push_back(key);
    return path;
  }

 private:
  const std::string& text_;
  std::string name_;
};

using Path = std::vector<std::string>;

bool box_inside(const Box& inner, const Box& outer) {
  return (inner.lo.array() > outer.lo.array()).all() && (inner.hi.array() < outer.hi.array()).all();
}

bool box_inside_closed(const Box& inner, const Box& outer) {
  return (inner.lo.array() >= outer.lo.array()).all() && (inner.hi.array() <= outer.hi.array()).all();
}

std::string format(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Region parse_region(const Reader& r, const json& j, const Path& path) {
  if (!j.is_string()) r.fail(path, "expected \"elastic\", \"acoustic\" or \"pml\"");
  const auto s = j.get<std::string>();
  if (s == "elastic") return Region::Elastic;
  if (s == "acoustic") return Region::Acoustic;
  if (s == "pml") return Region::Pml;
  r.fail(path, "unknown region \"" + s + "\"");
}

FaceTag parse_face_tag(const Reader& r, const json& j, const Path& path) {
  if (!j.is_string()) r.fail(path, "expected \"gamma_s\", \"pml_inner\" or \"outer\"");
  const auto s = j.get<std::string>();
  if (s == "gamma_s") return FaceTag::InterfaceGammaS;
  if (s == "pml_inner") return FaceTag::PmlInnerBoundaryB;
  if (s == "outer") return FaceTag::OuterGamma;
  r.fail(path, "unknown surface tag \"" + s + "\"");
}

int parse_group_id(const Reader& r, const std::string& key, const Path& path) {
  try {
    std::size_t used = 0;
    const int id = std::stoi(key, &used);
    if (used == key.size() && id > 0) return id;
  } catch (const std::exception&) {
  }
  r.fail(path, "physical group ids must be positive integers");
}

void parse_geometry(const Reader& r, const json& j, RunConfig& c) {
  const Path base{"geometry"};
  if (!j.is_object()) r.fail(base, "expected an object");
  const std::string type = j.value("type", std::string("box"));
  GeometryConfig& g = c.geometry;
  if (type == "box") {
    g.kind = GeometryConfig::Kind::Box;
    r.check_object(j, base, {"type", "outer", "h", "acoustic_box", "elastic_box", "elastic_dents"});
    if (!j.contains("outer")) r.fail(base, "missing \"outer\"");
    if (!j.contains("h")) r.fail(base, "missing \"h\"");
    g.outer = r.box(j["outer"], Reader::with(base, "outer"));
    g.h = r.number(j["h"], Reader::with(base, "h"));
    if (!(g.h > 0.0)) r.fail(Reader::with(base, "h"), "h = " + format(g.h) + " must be positive");
    if (!(g.h < (g.outer.hi - g.outer.lo).minCoeff())) {
      r.fail(Reader::with(base, "h"), "h = " + format(g.h) + " exceeds the box extent");
    }
    g.acoustic_box = j.contains("acoustic_box") ? r.box(j["acoustic_box"], Reader::with(base, "acoustic_box"))
                                                : g.outer;
    if (!box_inside_closed(g.acoustic_box, g.outer)) {
      r.fail(Reader::with(base, "acoustic_box"), "must lie inside the outer box");
    }
    if (j.contains("elastic_box")) {
      g.elastic_box = r.box(j["elastic_box"], Reader::with(base, "elastic_box"));
      if (!box_inside(*g.elastic_box, g.acoustic_box)) {
        r.fail(Reader::with(base, "elastic_box"), "must lie strictly inside the acoustic box");
      }
    }
    if (j.contains("elastic_dents")) {
      const Path dp = Reader::with(base, "elastic_dents");
      if (!j["elastic_dents"].is_array()) r.fail(dp, "expected an array of boxes");
      if (!g.elastic_box) r.fail(dp, "dents need an elastic_box");
      for (std::size_t i = 0; i < j["elastic_dents"].size(); ++i) {
        g.elastic_dents.push_back(r.box(j["elastic_dents"][i], Reader::with(dp, "[" + std::to_string(i) + "]")));
      }
    }
  } else if (type == "msh") {
    g.kind = GeometryConfig::Kind::Msh;
    r.check_object(j, base, {"type", "path", "volume_groups", "surface_groups"});
    if (!j.contains("path") || !j["path"].is_string()) r.fail(Reader::with(base, "path"), "expected a file path");
    g.msh_path = j["path"].get<std::string>();
    if (j.contains("volume_groups")) {
      const Path vp = Reader::with(base, "volume_groups");
      if (!j["volume_groups"].is_object()) r.fail(vp, "expected an object");
      g.groups.volumes.clear();
      for (const auto& [key, value] : j["volume_groups"].items()) {
        const Path kp = Reader::with(vp, key);
        g.groups.volumes[parse_group_id(r, key, kp)] = parse_region(r, value, kp);
      }
    }
    if (j.contains("surface_groups")) {
      const Path sp = Reader::with(base, "surface_groups");
      if (!j["surface_groups"].is_object()) r.fail(sp, "expected an object");
      g.groups.surfaces.clear();
      for (const auto& [key, value] : j["surface_groups"].items()) {
        const Path kp = Reader::with(sp, key);
        g.groups.surfaces[parse_group_id(r, key, kp)] = parse_face_tag(r, value, kp);
      }
    }
  } else {
    r.fail(Reader::with(base, "type"), "type = \"" + type + "\" must be \"box\" or \"msh\"");
  }
}

void parse_pml(const Reader& r, const json& j, RunConfig& c) {
  const Path base{"pml"};
  r.check_object(j, base, {"sigma0", "m", "L", "d"});
  PmlProfile& p = c.pml;
  if (j.contains("sigma0")) p.sigma0 = r.number(j["sigma0"], Reader::with(base, "sigma0"));
  if (j.contains("m")) p.m = static_cast<int>(r.integer(j["m"], Reader::with(base, "m")));
  if (!(p.sigma0 >= 0.0)) r.fail(Reader::with(base, "sigma0"), "sigma0 = " + format(p.sigma0) + " must be nonnegative");
  if (p.m < 1) r.fail(Reader::with(base, "m"), "m = " + std::to_string(p.m) + " must be at least 1");
  const bool box = c.geometry.kind == GeometryConfig::Kind::Box;
  for (const char* key : {"L", "d"}) {
    if (!j.contains(key)) continue;
    const Path kp = Reader::with(base, key);
    if (box) r.fail(kp, "derived from the box geometry; remove it");
    const Vec3 v = r.vec3(j[key], kp);
    auto& dst = std::string(key) == "L" ? p.L : p.d;
    for (int i = 0; i < 3; ++i) {
      if (!(v[i] > 0.0)) r.fail(kp, "entries must be positive");
      dst[i] = v[i];
    }
  }
  if (!box && p.enabled() && (!j.contains("L") || !j.contains("d"))) {
    r.fail(base, "imported meshes need explicit \"L\" and \"d\"");
  }
}

void parse_adaptive(const Reader& r, const json& j, RunConfig& c) {
  const Path base{"adaptive"};
  r.check_object(j, base, {"epsilon", "tau", "max_iterations", "max_dofs", "solver", "solver_tolerance"});
  AdaptiveConfig& a = c.adaptive;
  if (j.contains("epsilon")) a.epsilon = r.number(j["epsilon"], Reader::with(base, "epsilon"));
  if (j.contains("tau")) a.tau = r.number(j["tau"], Reader::with(base, "tau"));
  if (j.contains("max_iterations")) {
    a.max_iterations = static_cast<int>(r.integer(j["max_iterations"], Reader::with(base, "max_iterations")));
  }
  if (j.contains("max_dofs")) a.max_dofs = r.integer(j["max_dofs"], Reader::with(base, "max_dofs"));
  if (j.contains("solver_tolerance")) {
    a.solver.tolerance = r.number(j["solver_tolerance"], Reader::with(base, "solver_tolerance"));
  }
  if (j.contains("solver")) {
    const Path sp = Reader::with(base, "solver");
    if (!j["solver"].is_string()) r.fail(sp, "expected \"direct\" or \"gmres\"");
    const auto s = j["solver"].get<std::string>();
    if (s == "direct") {
      a.solver.kind = SolverKind::Direct;
    } else if (s == "gmres") {
      a.solver.kind = SolverKind::Iterative;
    } else {
      r.fail(sp, "solver = \"" + s + "\" must be \"direct\" or \"gmres\"");
    }
  }
  if (!(a.epsilon > 0.0)) r.fail(Reader::with(base, "epsilon"), "epsilon = " + format(a.epsilon) + " must be positive");
  if (!(a.tau > 0.0 && a.tau < 1.0)) r.fail(Reader::with(base, "tau"), "tau = " + format(a.tau) + " must lie in (0, 1)");
  if (a.max_iterations < 0) {
    r.fail(Reader::with(base, "max_iterations"), "max_iterations = " + std::to_string(a.max_iterations) + " must be nonnegative");
  }
  if (a.max_dofs <= 0) r.fail(Reader::with(base, "max_dofs"), "max_dofs = " + std::to_string(a.max_dofs) + " must be positive");
  if (!(a.solver.tolerance > 0.0 && a.solver.tolerance < 1.0)) {
    r.fail(Reader::with(base, "solver_tolerance"), "solver_tolerance = " + format(a.solver.tolerance) + " must lie in (0, 1)");
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(name, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
  }
  const Reader r(text, name);
  RunConfig c;
  r.check_object(doc, {}, {"scenario", "physics", "geometry", "pml", "adaptive", "output", "seed"});

  if (!doc.contains("scenario")) r.fail({}, "missing \"scenario\"");
  {
    const Path base{"scenario"};
    const json& s = doc["scenario"];
    r.check_object(s, base, {"mode", "source"});
    if (!s.contains("mode") || !s["mode"].is_string()) r.fail(Reader::with(base, "mode"), "expected \"manufactured\" or \"plane_wave\"");
    const auto mode = s["mode"].get<std::string>();
    if (mode == "manufactured") {
      c.mode = ScenarioMode::ManufacturedDirichlet;
    } else if (mode == "plane_wave") {
      c.mode = ScenarioMode::PlaneWavePml;
    } else {
      r.fail(Reader::with(base, "mode"), "mode = \"" + mode + "\" must be \"manufactured\" or \"plane_wave\"");
    }
    if (s.contains("source")) {
      if (c.mode != ScenarioMode::ManufacturedDirichlet) r.fail(Reader::with(base, "source"), "only used by manufactured runs");
      c.source = r.vec3(s["source"], Reader::with(base, "source"));
    }
  }

  if (doc.contains("physics")) {
    const Path base{"physics"};
    const json& p = doc["physics"];
    r.check_object(p, base, {"kappa", "omega", "lambda", "mu", "rho_a"});
    for (auto [key, dst] : {std::pair{"kappa", &c.physics.kappa}, std::pair{"omega", &c.physics.omega},
                            std::pair{"lambda", &c.physics.lambda}, std::pair{"mu", &c.physics.mu},
                            std::pair{"rho_a", &c.physics.rho_a}}) {
      if (!p.contains(key)) continue;
      *dst = r.number(p[key], Reader::with(base, key));
      if (!(*dst > 0.0)) r.fail(Reader::with(base, key), std::string(key) + " = " + format(*dst) + " must be positive");
    }
    if (c.mode == ScenarioMode::ManufacturedDirichlet) {
      const double defect = compatibility_defect(c.physics);
      if (std::abs(defect) > 1e-12) {
        r.fail(base, "kappa^2 (lambda + 2 mu) - omega^2 = " + format(defect) + " must vanish for manufactured runs");
      }
    }
  } else if (c.mode == ScenarioMode::ManufacturedDirichlet && std::abs(compatibility_defect(c.physics)) > 1e-12) {
    r.fail({}, "default physics violates kappa^2 (lambda + 2 mu) = omega^2");
  }

  if (!doc.contains("geometry")) r.fail({}, "missing \"geometry\"");
  parse_geometry(r, doc["geometry"], c);

  if (doc.contains("pml")) parse_pml(r, doc["pml"], c);
  if (c.mode == ScenarioMode::ManufacturedDirichlet && c.pml.enabled()) {
    r.fail(Path{"pml", "sigma0"}, "manufactured runs use exact Dirichlet data and no PML");
  }
  if (c.geometry.kind == GeometryConfig::Kind::Box) {
    const Box& B = c.geometry.acoustic_box;
    const Box& D = c.geometry.outer;
    if (c.pml.enabled()) {
      const Path gp{"geometry", "acoustic_box"};
      if (!box_inside(B, D)) r.fail(gp, "a PML needs the acoustic box strictly inside the outer box");
      if ((B.lo + B.hi).norm() > 1e-12 || (D.lo + D.hi).norm() > 1e-12) {
        r.fail(gp, "a PML needs boxes centred at the origin");
      }
      for (int i = 0; i < 3; ++i) {
        c.pml.L[i] = B.hi[i];
        c.pml.d[i] = D.hi[i] - B.hi[i];
      }
    }
  }
  if (c.mode == ScenarioMode::PlaneWavePml && !c.pml.enabled()) {
    r.fail(Path{"pml"}, "plane_wave runs need a PML with sigma0 > 0");
  }
  if (c.mode == ScenarioMode::ManufacturedDirichlet && c.geometry.kind == GeometryConfig::Kind::Box) {
    const Box& D = c.geometry.outer;
    if ((c.source.array() >= D.lo.array()).all() && (c.source.array() <= D.hi.array()).all()) {
      r.fail(Path{"scenario", "source"}, "source point must lie outside the closed outer box");
    }
  }

  if (doc.contains("adaptive")) parse_adaptive(r, doc["adaptive"], c);

  if (doc.contains("output")) {
    const Path base{"output"};
    const json& o = doc["output"];
    r.check_object(o, base, {"directory", "write_fields"});
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) r.fail(Reader::with(base, "directory"), "expected a path");
      c.output.directory = o["directory"].get<std::string>();
    }
    if (o.contains("write_fields")) {
      if (!o["write_fields"].is_boolean()) r.fail(Reader::with(base, "write_fields"), "expected true or false");
      c.output.write_fields = o["write_fields"].get<bool>();
    }
  }
  if (doc.contains("seed")) {
    const long seed = r.integer(doc["seed"], {"seed"});
    if (seed < 0) r.fail({"seed"}, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_run_config(ss.str(), path.string());
  const auto base = path.parent_path();
  if (c.geometry.kind == GeometryConfig::Kind::Msh && c.geometry.msh_path.is_relative()) {
    c.geometry.msh_path = base / c.geometry.msh_path;
  }
  return c;
}

TetMesh build_initial_mesh(const RunConfig& config) {
  const GeometryConfig& g = config.geometry;
  TetMesh mesh;
  if (g.kind == GeometryConfig::Kind::Box) {
    BoxRegions regions;
    regions.acoustic_box = g.acoustic_box;
    regions.elastic_box = g.elastic_box;
    regions.elastic_dents = g.elastic_dents;
    mesh = generate_box_mesh(g.outer, g.h, regions);
  } else {
    std::ifstream in(g.msh_path);
    if (!in) throw Error("cannot open mesh file " + g.msh_path.string());
    mesh = import_msh(in, g.groups);
    if (config.mode == ScenarioMode::ManufacturedDirichlet) {
      Vec3 lo = mesh.vertices.front();
      Vec3 hi = lo;
      for (const Vec3& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      if ((config.source.array() >= lo.array()).all() && (config.source.array() <= hi.array()).all()) {
        throw Error("source point lies inside the bounding box of the imported mesh");
      }
    }
  }
  return mesh;
}

Scenario make_scenario(const RunConfig& config) {
  return config.mode == ScenarioMode::ManufacturedDirichlet
             ? make_manufactured_scenario(config.physics, config.source)
             : make_plane_wave_scenario(config.physics);
}

}  // namespace aefem
