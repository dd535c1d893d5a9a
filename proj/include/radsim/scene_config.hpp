#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radsim/calibration.hpp"
#include "radsim/imaging.hpp"
#include "radsim/sensor.hpp"

namespace radsim {

struct MeshRef {
  std::string file;
  std::string material;  // binding for faces without an OBJ group
  std::map<std::string, std::string> material_map;  // OBJ group -> material name
  Vec3 translation;
  Quat rotation;
  double scale = 1.0;
};

struct OutputConfig {
  int bit_depth = 16;
  QuantScale scale = QuantScale::linear;
  double log_v_scale = 1.0;
};

struct CalibrationSettings {
  ParamSpec params;
  int max_evals = 300;
  double tolerance = 1e-6;
};

struct SceneConfig {
  uint64_t seed = 0;
  std::vector<Material> materials;  // user materials; air is implicit index 0
  std::vector<MeshRef> meshes;
  SensorModel sensor;
  TraceConfig trace;
  NoiseConfig noise;
  OutputConfig output;
  std::optional<CalibrationSettings> calibration;
  std::string base_dir;  // directory of the config file, for relative mesh paths
};

// Parses and fully validates a JSON scene config. Errors name the offending
// field. parse_scene_config_text takes the JSON text directly (base_dir
// resolves relative mesh paths).
SceneConfig parse_scene_config(const std::string& path);
SceneConfig parse_scene_config_text(const std::string& text, const std::string& base_dir);
std::string serialize_scene_config(const SceneConfig& cfg);
void save_scene_config(const SceneConfig& cfg, const std::string& path);

// Loads and merges all referenced meshes, resolves material bindings, builds
// the acceleration index.
Scene build_scene(const SceneConfig& cfg);

MaterialTable build_material_table(const SceneConfig& cfg);

struct Trajectory {
  struct Record {
    double t = 0.0;
    Pose pose;
  };
  std::vector<Record> records;
};

// Lines of "t tx ty tz qx qy qz qw"; '#' starts a comment. Timestamps must
// strictly increase; quaternions are normalized when within 1e-3 of unit
// length, rejected otherwise.
Trajectory load_trajectory(const std::string& path);

uint64_t frame_seed(uint64_t base_seed, std::size_t frame_index);

}  // namespace radsim
