#include "radsim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace radsim {

namespace fs = std::filesystem;

PolarImage render_frame(const SceneConfig& cfg, const Scene& scene, const Pose& robot_pose,
                        uint64_t seed, int threads) {
  PolarImage raw = simulate_frame(scene, robot_pose, cfg.sensor, cfg.trace, seed, threads);
  return add_noise(raw, cfg.noise);
}

namespace {

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.pgm", index);
  return buf;
}

std::vector<fs::path> list_frames(const std::string& dir) {
  std::vector<fs::path> frames;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("frame_", 0) == 0 && name.size() > 4 &&
        name.compare(name.size() - 4, 4, ".pgm") == 0)
      frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

struct MeanStd {
  double mean = 0.0, sd = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty()) return ms;
  for (double x : xs) ms.mean += x;
  ms.mean /= double(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - ms.mean) * (x - ms.mean);
    ms.sd = std::sqrt(acc / double(xs.size() - 1));
  }
  return ms;
}

}  // namespace

void cmd_render(const std::string& scene_path, const std::string& trajectory_path,
                const std::string& out_dir, const RenderOptions& opt) {
  SceneConfig cfg = parse_scene_config(scene_path);
  if (opt.lidar_like) {
    cfg.trace.lidar_like = true;
    cfg.noise.range_blur_sigma = 0.0;
    cfg.noise.system = {};
    cfg.noise.ambient = {};
  }
  Trajectory traj = load_trajectory(trajectory_path);
  Scene scene = build_scene(cfg);

  // The output directory must be writable before any simulation runs.
  fs::create_directories(out_dir);
  fs::path manifest_path = fs::path(out_dir) / "manifest.csv";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw std::runtime_error("cannot write " + manifest_path.string());
  manifest << "index,timestamp,seed\n";

  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const Trajectory::Record& rec = traj.records[i];
    uint64_t seed = frame_seed(cfg.seed, i);
    PolarImage img = render_frame(cfg, scene, rec.pose, seed, opt.threads);
    img.timestamp = rec.t;
    QuantizedImage q = quantize(img, cfg.output.bit_depth, cfg.output.scale,
                                cfg.output.log_v_scale);
    write_pgm(q, (fs::path(out_dir) / frame_name(i)).string());
    manifest << i << "," << rec.t << "," << seed << "\n";
  }
  if (!manifest) throw std::runtime_error("short write to " + manifest_path.string());
}

CompareResult cmd_compare(const std::string& dir_a, const std::string& dir_b,
                          const std::string& out_csv, const MetricConfig& metric) {
  std::vector<fs::path> frames_a = list_frames(dir_a);
  std::vector<fs::path> frames_b = list_frames(dir_b);
  if (frames_a.empty()) throw std::runtime_error("no frame_*.pgm in " + dir_a);
  if (frames_a.size() != frames_b.size())
    throw std::runtime_error("frame count mismatch: " + std::to_string(frames_a.size()) +
                             " vs " + std::to_string(frames_b.size()));

  CompareResult result;
  std::vector<double> mis, ssi;
  for (std::size_t i = 0; i < frames_a.size(); ++i) {
    PolarImage a = to_double_image(read_pgm(frames_a[i].string()));
    PolarImage b = to_double_image(read_pgm(frames_b[i].string()));
    if (a.n_azimuth != b.n_azimuth || a.n_range_bins != b.n_range_bins)
      throw std::runtime_error("dimension mismatch at " + frames_a[i].filename().string());
    FrameScore row;
    row.frame = frames_a[i].filename().string();
    row.mis = mutual_information(a, b, metric);
    row.ssi = ssim(a, b, metric);
    mis.push_back(row.mis);
    ssi.push_back(row.ssi);
    result.rows.push_back(row);
  }

  MeanStd m = mean_std(mis), s = mean_std(ssi);
  result.mean_mis = m.mean;
  result.std_mis = m.sd;
  result.mean_ssi = s.mean;
  result.std_ssi = s.sd;

  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) throw std::runtime_error("cannot write " + out_csv);
    f << "frame,mis,ssi\n";
    for (const FrameScore& row : result.rows)
      f << row.frame << "," << row.mis << "," << row.ssi << "\n";
    f << "mean," << result.mean_mis << "," << result.mean_ssi << "\n";
    f << "std," << result.std_mis << "," << result.std_ssi << "\n";
  }
  return result;
}

std::vector<BenchRow> cmd_bench(const std::string& scene_path, const std::vector<int>& samples,
                                int repeats, const std::string& out_csv, int threads) {
  if (samples.empty()) throw std::runtime_error("bench: sample list is empty");
  if (repeats < 1) throw std::runtime_error("bench: repeats must be >= 1");

  SceneConfig cfg = parse_scene_config(scene_path);
  Scene scene = build_scene(cfg);
  Pose pose;  // benchmark from the origin; runtime depends on ray count, not pose

  std::vector<BenchRow> rows;
  for (int n : samples) {
    if (n < 1) throw std::runtime_error("bench: sample counts must be >= 1");
    SceneConfig run = cfg;
    run.sensor.beam.n_samples = n;

    auto frame_ms = [&](uint64_t seed) {
      auto start = std::chrono::steady_clock::now();
      PolarImage img = render_frame(run, scene, pose, seed, threads);
      auto stop = std::chrono::steady_clock::now();
      (void)img;
      return std::chrono::duration<double, std::milli>(stop - start).count();
    };

    frame_ms(frame_seed(cfg.seed, 0));  // warmup, excluded
    std::vector<double> times;
    for (int r = 0; r < repeats; ++r) times.push_back(frame_ms(frame_seed(cfg.seed, r + 1)));
    MeanStd ms = mean_std(times);
    rows.push_back({n, ms.mean, ms.sd});
  }

  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) throw std::runtime_error("cannot write " + out_csv);
    f << "n_samples,mean_ms,std_ms\n";
    for (const BenchRow& row : rows)
      f << row.n_samples << "," << row.mean_ms << "," << row.std_ms << "\n";
  }
  return rows;
}

namespace {

Material* find_material(SceneConfig& cfg, const std::string& name) {
  for (Material& m : cfg.materials)
    if (m.name == name) return &m;
  return nullptr;
}

NoiseStage* find_stage(SceneConfig& cfg, const std::string& name) {
  if (name == "system") return &cfg.noise.system;
  if (name == "ambient") return &cfg.noise.ambient;
  return nullptr;
}

}  // namespace

void apply_param(SceneConfig& cfg, const std::string& name, double value) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t dot = name.find('.', start);
    if (dot == std::string::npos) dot = name.size();
    parts.push_back(name.substr(start, dot - start));
    start = dot + 1;
  }

  auto unknown = [&]() -> void { throw std::invalid_argument("unknown parameter '" + name + "'"); };

  if (parts.size() == 3 && parts[0] == "material") {
    Material* m = find_material(cfg, parts[1]);
    if (!m) unknown();
    if (parts[2] == "A") m->A = value;
    else if (parts[2] == "B") m->B = value;
    else if (parts[2] == "C") m->C = value;
    else if (parts[2] == "velocity") m->velocity = value;
    else unknown();
    return;
  }
  if (parts.size() == 2 && parts[0] == "trace") {
    if (parts[1] == "f_rx") cfg.trace.f_rx = value;
    else if (parts[1] == "min_energy") cfg.trace.min_energy = value;
    else if (parts[1] == "total_emitted_energy") cfg.trace.total_emitted_energy = value;
    else unknown();
    return;
  }
  if (parts.size() == 2 && parts[0] == "beam") {
    if (parts[1] == "width_b") cfg.sensor.beam.width_b = value;
    else if (parts[1] == "inside_prob_P") cfg.sensor.beam.inside_prob_P = value;
    else unknown();
    return;
  }
  if (parts.size() == 2 && parts[0] == "noise" && parts[1] == "range_blur_sigma") {
    cfg.noise.range_blur_sigma = value;
    return;
  }
  if (parts.size() == 3 && parts[0] == "noise") {
    NoiseStage* stage = find_stage(cfg, parts[1]);
    if (!stage) unknown();
    if (parts[2] == "amplitude") stage->amplitude = value;
    else if (parts[2] == "freq_az") stage->freq_az = value;
    else if (parts[2] == "freq_range") stage->freq_range = value;
    else unknown();
    return;
  }
  unknown();
}

double evaluate_objective(const ObjectiveContext& ctx, const ParamSpec& spec,
                          const std::vector<double>& values) {
  if (values.size() != spec.size())
    throw std::invalid_argument("objective: value count does not match the spec");
  if (ctx.poses.size() != ctx.references.size() || ctx.poses.empty())
    throw std::invalid_argument("objective: poses and references must pair up");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ParamEntry& e = spec.entries[i];
    if (values[i] < e.lower || values[i] > e.upper)
      throw std::invalid_argument("objective: '" + e.name + "' out of bounds");
  }

  SceneConfig cfg = ctx.config;
  for (std::size_t i = 0; i < values.size(); ++i) apply_param(cfg, spec.entries[i].name, values[i]);

  // Joint constraint A+B < 1, projected with a small margin.
  for (Material& m : cfg.materials) {
    double sum = m.A + m.B;
    if (sum >= 1.0 - 1e-3) {
      double scale = (1.0 - 1e-3) / sum;
      m.A *= scale;
      m.B *= scale;
    }
  }

  // Parameters never touch geometry, only material values; calibration scenes
  // are small enough that rebuilding the index per evaluation is cheap.
  Scene eval_scene;
  eval_scene.mesh = ctx.scene->mesh;
  eval_scene.materials = build_material_table(cfg);
  if (ctx.scene->accel) eval_scene.accel.emplace(eval_scene.mesh);

  double total = 0.0;
  for (std::size_t i = 0; i < ctx.poses.size(); ++i) {
    PolarImage img = render_frame(cfg, eval_scene, ctx.poses[i], frame_seed(ctx.seed, i),
                                  ctx.threads);
    QuantizedImage q = quantize(img, cfg.output.bit_depth, cfg.output.scale,
                                cfg.output.log_v_scale);
    total += mutual_information(to_double_image(q), ctx.references[i], ctx.metric);
  }
  return total / double(ctx.poses.size());
}

CalibrationResult cmd_calibrate(const std::string& scene_path,
                                const std::string& trajectory_path,
                                const std::string& reference_dir, const std::string& out_config,
                                const std::string& out_trace_csv, int threads) {
  SceneConfig cfg = parse_scene_config(scene_path);
  if (!cfg.calibration)
    throw std::runtime_error("scene config has no calibration section");
  Trajectory traj = load_trajectory(trajectory_path);

  ObjectiveContext ctx;
  ctx.config = cfg;
  Scene scene = build_scene(cfg);
  ctx.scene = &scene;
  ctx.seed = cfg.seed;
  ctx.threads = threads;
  for (const auto& rec : traj.records) ctx.poses.push_back(rec.pose);
  for (const fs::path& frame : list_frames(reference_dir))
    ctx.references.push_back(to_double_image(read_pgm(frame.string())));
  if (ctx.references.size() != ctx.poses.size())
    throw std::runtime_error("reference frame count does not match the trajectory");

  const ParamSpec& spec = cfg.calibration->params;
  auto objective = [&](const std::vector<double>& values) {
    return evaluate_objective(ctx, spec, values);
  };
  CalibrationResult result =
      nelder_mead(objective, spec, cfg.calibration->max_evals, cfg.calibration->tolerance);

  SceneConfig fitted = cfg;
  for (std::size_t i = 0; i < spec.size(); ++i)
    apply_param(fitted, spec.entries[i].name, result.best_values[i]);
  if (!out_config.empty()) save_scene_config(fitted, out_config);

  if (!out_trace_csv.empty()) {
    std::ofstream f(out_trace_csv);
    if (!f) throw std::runtime_error("cannot write " + out_trace_csv);
    f << "iteration,best_objective\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i)
      f << i << "," << result.trace[i] << "\n";
  }
  return result;
}

}  // namespace radsim
