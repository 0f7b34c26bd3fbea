#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aefem/adaptive.hpp"

namespace aefem {

struct GeometryConfig {
  enum class Kind { Box, Msh };
  Kind kind = Kind::Box;
  // Built-in nested boxes.
  Box outer;
  double h = 0.1;
  Box acoustic_box;
  std::optional<Box> elastic_box;
  std::vector<Box> elastic_dents;
  // Imported mesh; a relative path is resolved against the config file's directory.
  std::filesystem::path msh_path;
  MshPhysicalGroups groups;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool write_fields = false;
};

/// Everything one run needs. Built by parse_run_config, which validates all module
/// preconditions and rejects unknown keys.
struct RunConfig {
  ScenarioMode mode = ScenarioMode::ManufacturedDirichlet;
  Vec3 source{1.0, 0.0, 0.0};
  PhysicsConfig physics;
  GeometryConfig geometry;
  PmlProfile pml;
  AdaptiveConfig adaptive;
  OutputConfig output;
  std::uint64_t seed = 0;
};

/// Thrown for malformed or invalid configuration; what() reads "<name>:<line>: <message>".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& name, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

RunConfig parse_run_config(const std::string& text, const std::string& name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

TetMesh build_initial_mesh(const RunConfig& config);
Scenario make_scenario(const RunConfig& config);

}  // namespace aefem
