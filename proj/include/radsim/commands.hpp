#pragma once

#include <string>
#include <vector>

#include "radsim/calibration.hpp"
#include "radsim/metrics.hpp"
#include "radsim/scene_config.hpp"
#include "radsim/tracer.hpp"

namespace radsim {

// One simulated frame through the full pipeline (trace + noise), not yet
// quantized. Shared by render, bench and the calibration objective.
PolarImage render_frame(const SceneConfig& cfg, const Scene& scene, const Pose& robot_pose,
                        uint64_t seed, int threads);

struct RenderOptions {
  int threads = 0;        // 0 = hardware concurrency
  bool lidar_like = false;  // baseline preset: single bounce, mean ray, no noise
};

// Writes frame_<index>.pgm per trajectory record plus manifest.csv
// (index,timestamp,seed) into out_dir.
void cmd_render(const std::string& scene_path, const std::string& trajectory_path,
                const std::string& out_dir, const RenderOptions& opt = {});

struct FrameScore {
  std::string frame;
  double mis = 0.0;
  double ssi = 0.0;
};

struct CompareResult {
  std::vector<FrameScore> rows;
  double mean_mis = 0.0, std_mis = 0.0;
  double mean_ssi = 0.0, std_ssi = 0.0;
};

// Scores matching frame_*.pgm pairs of two directories and writes per-frame
// rows plus mean/std summary rows to out_csv.
CompareResult cmd_compare(const std::string& dir_a, const std::string& dir_b,
                          const std::string& out_csv, const MetricConfig& metric = {});

struct BenchRow {
  int n_samples = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
};

// Frame wall-clock per sample count; one warmup frame per row is excluded.
std::vector<BenchRow> cmd_bench(const std::string& scene_path, const std::vector<int>& samples,
                                int repeats, const std::string& out_csv, int threads = 0);

struct ObjectiveContext {
  SceneConfig config;
  const Scene* scene = nullptr;  // geometry prebuilt from config; materials are re-read per eval
  std::vector<Pose> poses;
  std::vector<PolarImage> references;
  uint64_t seed = 0;
  MetricConfig metric;
  int threads = 1;
};

// Applies one named parameter to the config. Throws on unknown paths.
void apply_param(SceneConfig& cfg, const std::string& name, double value);

// Mean mutual information between the frames simulated at `values` and the
// reference frames. Deterministic in (values, seed). Values outside the spec
// bounds raise std::invalid_argument before any simulation.
double evaluate_objective(const ObjectiveContext& ctx, const ParamSpec& spec,
                          const std::vector<double>& values);

// Fits the config's calibration parameters against reference PGM frames and
// writes the fitted config plus an objective-trace CSV.
CalibrationResult cmd_calibrate(const std::string& scene_path,
                                const std::string& trajectory_path,
                                const std::string& reference_dir,
                                const std::string& out_config,
                                const std::string& out_trace_csv, int threads = 0);

}  // namespace radsim
