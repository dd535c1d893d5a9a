#include "radsim/scene_config.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "radsim/mesh_io.hpp"

namespace radsim {

namespace {

using nlohmann::json;

[[noreturn]] void cfg_fail(const std::string& field, const std::string& what) {
  throw std::runtime_error("scene config: " + field + ": " + what);
}

double get_num(const json& j, const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_number()) cfg_fail(field, "expected a number");
  return j[field].get<double>();
}

bool get_bool(const json& j, const std::string& field, bool fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_boolean()) cfg_fail(field, "expected a boolean");
  return j[field].get<bool>();
}

std::string get_str(const json& j, const std::string& field, const std::string& fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_string()) cfg_fail(field, "expected a string");
  return j[field].get<std::string>();
}

Vec3 get_vec3(const json& j, const std::string& field, Vec3 fallback) {
  if (!j.contains(field)) return fallback;
  const json& v = j[field];
  if (!v.is_array() || v.size() != 3) cfg_fail(field, "expected [x, y, z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

Quat get_quat(const json& j, const std::string& field) {
  if (!j.contains(field)) return {};
  const json& v = j[field];
  if (!v.is_array() || v.size() != 4) cfg_fail(field, "expected [qx, qy, qz, qw]");
  Quat q{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
  if (std::abs(q.norm() - 1.0) > 1e-3) cfg_fail(field, "quaternion is not unit length");
  return q.normalized();
}

Pose get_pose(const json& j, const std::string& field) {
  Pose p;
  if (!j.contains(field)) return p;
  const json& v = j[field];
  p.position = get_vec3(v, "translation", {});
  p.orientation = get_quat(v, "rotation_quat");
  return p;
}

BeamKind parse_beam_kind(const std::string& s) {
  if (s == "D1") return BeamKind::D1;
  if (s == "D2") return BeamKind::D2;
  if (s == "D3") return BeamKind::D3;
  if (s == "D4") return BeamKind::D4;
  cfg_fail("sensor.beam.kind", "expected one of D1..D4, got '" + s + "'");
}

NoiseKind parse_noise_kind(const std::string& s, const std::string& field) {
  if (s == "none") return NoiseKind::none;
  if (s == "uniform") return NoiseKind::uniform;
  if (s == "perlin") return NoiseKind::perlin;
  cfg_fail(field, "expected none/uniform/perlin, got '" + s + "'");
}

NoiseStage parse_noise_stage(const json& j, const std::string& field, NoiseStage fallback) {
  if (!j.contains(field)) return fallback;
  const json& v = j[field];
  NoiseStage stage;
  stage.kind = parse_noise_kind(get_str(v, "kind", "none"), field + ".kind");
  stage.amplitude = get_num(v, "amplitude", 0.0);
  stage.freq_az = get_num(v, "freq_az", stage.freq_az);
  stage.freq_range = get_num(v, "freq_range", stage.freq_range);
  if (stage.amplitude < 0.0) cfg_fail(field + ".amplitude", "must be >= 0");
  return stage;
}

}  // namespace

SceneConfig parse_scene_config_text(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scene config: ") + e.what());
  }

  SceneConfig cfg;
  cfg.base_dir = base_dir;
  cfg.seed = uint64_t(get_num(root, "seed", 0.0));

  if (root.contains("materials")) {
    if (!root["materials"].is_array()) cfg_fail("materials", "expected an array");
    for (std::size_t i = 0; i < root["materials"].size(); ++i) {
      const json& m = root["materials"][i];
      Material mat;
      mat.name = get_str(m, "name", "");
      if (mat.name.empty()) cfg_fail("materials[" + std::to_string(i) + "].name", "required");
      if (mat.name == "air")
        cfg_fail("materials[" + std::to_string(i) + "]", "'air' is reserved");
      mat.velocity = get_num(m, "velocity", kSpeedOfLight);
      mat.A = get_num(m, "A", 0.0);
      mat.B = get_num(m, "B", 0.0);
      mat.C = get_num(m, "C", 1.0);
      try {
        mat.validate();
      } catch (const std::exception& e) {
        cfg_fail("materials[" + std::to_string(i) + "]", e.what());
      }
      cfg.materials.push_back(mat);
    }
  }

  if (root.contains("meshes")) {
    if (!root["meshes"].is_array()) cfg_fail("meshes", "expected an array");
    for (std::size_t i = 0; i < root["meshes"].size(); ++i) {
      const json& m = root["meshes"][i];
      std::string field = "meshes[" + std::to_string(i) + "]";
      MeshRef ref;
      ref.file = get_str(m, "file", "");
      if (ref.file.empty()) cfg_fail(field + ".file", "required");
      ref.material = get_str(m, "material", "");
      if (m.contains("material_map")) {
        for (auto& [key, value] : m["material_map"].items())
          ref.material_map[key] = value.get<std::string>();
      }
      ref.translation = get_vec3(m, "translation", {});
      ref.rotation = get_quat(m, "rotation_quat");
      ref.scale = get_num(m, "scale", 1.0);
      if (!(ref.scale > 0.0)) cfg_fail(field + ".scale", "must be > 0");
      cfg.meshes.push_back(ref);
    }
  }

  if (root.contains("sensor")) {
    const json& s = root["sensor"];
    cfg.sensor.n_azimuth = int(get_num(s, "n_azimuth", cfg.sensor.n_azimuth));
    cfg.sensor.range_resolution = get_num(s, "range_resolution", cfg.sensor.range_resolution);
    cfg.sensor.n_range_bins = int(get_num(s, "n_range_bins", cfg.sensor.n_range_bins));
    cfg.sensor.mount = get_pose(s, "mount");
    if (s.contains("beam")) {
      const json& b = s["beam"];
      cfg.sensor.beam.kind = parse_beam_kind(get_str(b, "kind", "D3"));
      cfg.sensor.beam.width_b =
          get_num(b, "width_deg", cfg.sensor.beam.width_b * 180.0 / std::numbers::pi) *
          std::numbers::pi / 180.0;
      cfg.sensor.beam.inside_prob_P = get_num(b, "inside_prob", cfg.sensor.beam.inside_prob_P);
      cfg.sensor.beam.n_samples = int(get_num(b, "n_samples", cfg.sensor.beam.n_samples));
    }
    try {
      cfg.sensor.validate();
    } catch (const std::exception& e) {
      cfg_fail("sensor", e.what());
    }
  }

  if (root.contains("trace")) {
    const json& t = root["trace"];
    cfg.trace.max_bounces = int(get_num(t, "max_bounces", cfg.trace.max_bounces));
    cfg.trace.min_energy = get_num(t, "min_energy", cfg.trace.min_energy);
    cfg.trace.total_emitted_energy =
        get_num(t, "total_emitted_energy", cfg.trace.total_emitted_energy);
    cfg.trace.return_leg_attenuation =
        get_bool(t, "return_leg_attenuation", cfg.trace.return_leg_attenuation);
    cfg.trace.lidar_like = get_bool(t, "lidar_like", cfg.trace.lidar_like);
    cfg.trace.f_rx = get_num(t, "f_rx", cfg.trace.f_rx);
    try {
      cfg.trace.validate();
    } catch (const std::exception& e) {
      cfg_fail("trace", e.what());
    }
  }

  if (root.contains("noise")) {
    const json& n = root["noise"];
    cfg.noise.range_blur_sigma = get_num(n, "range_blur_sigma", cfg.noise.range_blur_sigma);
    if (cfg.noise.range_blur_sigma < 0.0) cfg_fail("noise.range_blur_sigma", "must be >= 0");
    cfg.noise.system = parse_noise_stage(n, "system", cfg.noise.system);
    cfg.noise.ambient = parse_noise_stage(n, "ambient", cfg.noise.ambient);
    cfg.noise.noise_seed = uint64_t(get_num(n, "noise_seed", 0.0));
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    cfg.output.bit_depth = int(get_num(o, "bit_depth", cfg.output.bit_depth));
    if (cfg.output.bit_depth != 8 && cfg.output.bit_depth != 16)
      cfg_fail("output.bit_depth", "must be 8 or 16");
    std::string q = get_str(o, "quantize", "linear");
    if (q == "linear") cfg.output.scale = QuantScale::linear;
    else if (q == "log") cfg.output.scale = QuantScale::log_scale;
    else cfg_fail("output.quantize", "expected linear or log");
    cfg.output.log_v_scale = get_num(o, "log_v_scale", cfg.output.log_v_scale);
    if (!(cfg.output.log_v_scale > 0.0)) cfg_fail("output.log_v_scale", "must be > 0");
  }

  if (root.contains("calibration")) {
    const json& c = root["calibration"];
    CalibrationSettings settings;
    settings.max_evals = int(get_num(c, "max_evals", settings.max_evals));
    settings.tolerance = get_num(c, "tolerance", settings.tolerance);
    if (!c.contains("params") || !c["params"].is_array() || c["params"].empty())
      cfg_fail("calibration.params", "expected a non-empty array");
    for (const json& p : c["params"]) {
      ParamEntry e;
      e.name = get_str(p, "name", "");
      e.lower = get_num(p, "lower", 0.0);
      e.upper = get_num(p, "upper", 1.0);
      e.initial = get_num(p, "initial", 0.5 * (e.lower + e.upper));
      settings.params.entries.push_back(e);
    }
    try {
      settings.params.validate();
    } catch (const std::exception& e) {
      cfg_fail("calibration.params", e.what());
    }
    cfg.calibration = settings;
  }

  // Bindings must resolve before any mesh file is touched.
  for (std::size_t i = 0; i < cfg.meshes.size(); ++i) {
    auto known = [&](const std::string& name) {
      if (name == "air") return true;
      for (const Material& m : cfg.materials)
        if (m.name == name) return true;
      return false;
    };
    const MeshRef& ref = cfg.meshes[i];
    if (!ref.material.empty() && !known(ref.material))
      cfg_fail("meshes[" + std::to_string(i) + "].material",
               "unknown material '" + ref.material + "'");
    for (const auto& [group, name] : ref.material_map)
      if (!known(name))
        cfg_fail("meshes[" + std::to_string(i) + "].material_map",
                 "unknown material '" + name + "'");
  }

  return cfg;
}

SceneConfig parse_scene_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("scene config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene_config_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_scene_config(const SceneConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;

  root["materials"] = json::array();
  for (const Material& m : cfg.materials)
    root["materials"].push_back(
        {{"name", m.name}, {"velocity", m.velocity}, {"A", m.A}, {"B", m.B}, {"C", m.C}});

  root["meshes"] = json::array();
  for (const MeshRef& ref : cfg.meshes) {
    json m;
    m["file"] = ref.file;
    if (!ref.material.empty()) m["material"] = ref.material;
    if (!ref.material_map.empty()) m["material_map"] = ref.material_map;
    m["translation"] = {ref.translation.x, ref.translation.y, ref.translation.z};
    m["rotation_quat"] = {ref.rotation.x, ref.rotation.y, ref.rotation.z, ref.rotation.w};
    m["scale"] = ref.scale;
    root["meshes"].push_back(m);
  }

  const char* kind_names[] = {"D1", "D2", "D3", "D4"};
  root["sensor"] = {
      {"n_azimuth", cfg.sensor.n_azimuth},
      {"range_resolution", cfg.sensor.range_resolution},
      {"n_range_bins", cfg.sensor.n_range_bins},
      {"beam",
       {{"kind", kind_names[int(cfg.sensor.beam.kind)]},
        {"width_deg", cfg.sensor.beam.width_b * 180.0 / std::numbers::pi},
        {"inside_prob", cfg.sensor.beam.inside_prob_P},
        {"n_samples", cfg.sensor.beam.n_samples}}},
      {"mount",
       {{"translation", {cfg.sensor.mount.position.x, cfg.sensor.mount.position.y,
                         cfg.sensor.mount.position.z}},
        {"rotation_quat", {cfg.sensor.mount.orientation.x, cfg.sensor.mount.orientation.y,
                           cfg.sensor.mount.orientation.z, cfg.sensor.mount.orientation.w}}}}};

  root["trace"] = {{"max_bounces", cfg.trace.max_bounces},
                   {"min_energy", cfg.trace.min_energy},
                   {"total_emitted_energy", cfg.trace.total_emitted_energy},
                   {"return_leg_attenuation", cfg.trace.return_leg_attenuation},
                   {"lidar_like", cfg.trace.lidar_like},
                   {"f_rx", cfg.trace.f_rx}};

  const char* noise_names[] = {"none", "uniform", "perlin"};
  auto stage_json = [&](const NoiseStage& s) {
    return json{{"kind", noise_names[int(s.kind)]},
                {"amplitude", s.amplitude},
                {"freq_az", s.freq_az},
                {"freq_range", s.freq_range}};
  };
  root["noise"] = {{"range_blur_sigma", cfg.noise.range_blur_sigma},
                   {"system", stage_json(cfg.noise.system)},
                   {"ambient", stage_json(cfg.noise.ambient)},
                   {"noise_seed", cfg.noise.noise_seed}};

  root["output"] = {{"bit_depth", cfg.output.bit_depth},
                    {"quantize", cfg.output.scale == QuantScale::linear ? "linear" : "log"},
                    {"log_v_scale", cfg.output.log_v_scale}};

  if (cfg.calibration) {
    json params = json::array();
    for (const ParamEntry& e : cfg.calibration->params.entries)
      params.push_back({{"name", e.name},
                        {"lower", e.lower},
                        {"upper", e.upper},
                        {"initial", e.initial}});
    root["calibration"] = {{"max_evals", cfg.calibration->max_evals},
                           {"tolerance", cfg.calibration->tolerance},
                           {"params", params}};
  }

  return root.dump(2) + "\n";
}

void save_scene_config(const SceneConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("scene config: cannot write " + path);
  f << serialize_scene_config(cfg);
}

MaterialTable build_material_table(const SceneConfig& cfg) {
  MaterialTable table = MaterialTable::with_air();
  for (const Material& m : cfg.materials) table.add(m);
  return table;
}

Scene build_scene(const SceneConfig& cfg) {
  MaterialTable table = build_material_table(cfg);

  TriangleMesh merged;
  for (std::size_t i = 0; i < cfg.meshes.size(); ++i) {
    const MeshRef& ref = cfg.meshes[i];
    std::filesystem::path file(ref.file);
    if (file.is_relative() && !cfg.base_dir.empty())
      file = std::filesystem::path(cfg.base_dir) / file;
    LoadedMesh loaded = load_mesh(file.string());

    int default_id = -1;
    if (!ref.material.empty()) {
      default_id = table.index_of(ref.material);
      if (default_id < 0)
        cfg_fail("meshes[" + std::to_string(i) + "].material",
                 "unknown material '" + ref.material + "'");
    }

    uint32_t base = uint32_t(merged.vertices.size());
    for (const Vec3& v : loaded.vertices)
      merged.vertices.push_back(ref.translation + ref.rotation.rotate(v * ref.scale));
    for (std::size_t k = 0; k < loaded.faces.size(); ++k) {
      const auto& face = loaded.faces[k];
      int material_id = default_id;
      const std::string& group = loaded.face_groups[k];
      if (!group.empty()) {
        auto it = ref.material_map.find(group);
        if (it != ref.material_map.end()) {
          material_id = table.index_of(it->second);
        } else if (int direct = table.index_of(group); direct >= 0) {
          material_id = direct;  // OBJ group named exactly like a material
        }
      }
      if (material_id < 0)
        cfg_fail("meshes[" + std::to_string(i) + "]",
                 group.empty() ? "face has no material binding"
                               : "no material binding for OBJ group '" + group + "'");
      merged.triangles.push_back({base + face[0], base + face[1], base + face[2], material_id});
    }
  }

  return make_scene(std::move(merged), std::move(table));
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("trajectory: cannot open " + path);

  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double t, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> t)) continue;  // blank or comment-only line
    if (!(ss >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) {
      throw std::runtime_error("trajectory: " + path + ":" + std::to_string(line_no) +
                               ": malformed record");
    }
    std::string extra;
    if (ss >> extra)
      throw std::runtime_error("trajectory: " + path + ":" + std::to_string(line_no) +
                               ": trailing tokens");
    Quat q{qx, qy, qz, qw};
    if (std::abs(q.norm() - 1.0) > 1e-3)
      throw std::runtime_error("trajectory: " + path + ":" + std::to_string(line_no) +
                               ": quaternion norm " + std::to_string(q.norm()) +
                               " too far from 1");
    if (!traj.records.empty() && t <= traj.records.back().t)
      throw std::runtime_error("trajectory: " + path + ":" + std::to_string(line_no) +
                               ": timestamps must strictly increase");
    traj.records.push_back({t, Pose{{tx, ty, tz}, q.normalized()}});
  }
  return traj;
}

uint64_t frame_seed(uint64_t base_seed, std::size_t frame_index) {
  return mix64(base_seed + 0x9e3779b97f4a7c15ull * (frame_index + 1));
}

}  // namespace radsim
