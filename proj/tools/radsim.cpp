#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"radsim - rotating FMCW radar simulator"};
  app.require_subcommand(1);

  std::string scene, trajectory, out_dir, dir_a, dir_b, out_csv;
  std::string reference_dir, out_config, out_trace;
  int threads = 0;
  bool lidar_like = false;
  std::vector<int> samples{200, 400, 600, 800, 1000};
  int repeats = 3;

  CLI::App* render = app.add_subcommand("render", "simulate polar frames along a trajectory");
  render->add_option("--scene", scene, "scene config (JSON)")->required();
  render->add_option("--trajectory", trajectory, "trajectory file")->required();
  render->add_option("--out", out_dir, "output directory")->required();
  render->add_option("--threads", threads, "worker threads (0 = hardware)");
  render->add_flag("--lidar-like", lidar_like, "baseline preset: one bounce, mean ray, no noise");

  CLI::App* compare = app.add_subcommand("compare", "score frame directories (MIS/SSI)");
  compare->add_option("--dir-a", dir_a, "first frame directory")->required();
  compare->add_option("--dir-b", dir_b, "second frame directory")->required();
  compare->add_option("--out", out_csv, "output CSV")->required();

  CLI::App* calibrate = app.add_subcommand("calibrate", "fit config parameters to references");
  calibrate->add_option("--scene", scene, "scene config with a calibration section")->required();
  calibrate->add_option("--trajectory", trajectory, "trajectory file")->required();
  calibrate->add_option("--reference", reference_dir, "reference frame directory")->required();
  calibrate->add_option("--out-config", out_config, "fitted config path")->required();
  calibrate->add_option("--out-trace", out_trace, "objective trace CSV")->required();
  calibrate->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* bench = app.add_subcommand("bench", "frame runtime vs rays per azimuth");
  bench->add_option("--scene", scene, "scene config (JSON)")->required();
  bench->add_option("--samples", samples, "sample counts to measure");
  bench->add_option("--repeats", repeats, "timed frames per sample count");
  bench->add_option("--out", out_csv, "output CSV")->required();
  bench->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (render->parsed()) {
      radsim::RenderOptions opt;
      opt.threads = threads;
      opt.lidar_like = lidar_like;
      radsim::cmd_render(scene, trajectory, out_dir, opt);
    } else if (compare->parsed()) {
      radsim::CompareResult r = radsim::cmd_compare(dir_a, dir_b, out_csv);
      std::printf("frames=%zu mean_mis=%.6g mean_ssi=%.6g\n", r.rows.size(), r.mean_mis,
                  r.mean_ssi);
    } else if (calibrate->parsed()) {
      radsim::CalibrationResult r =
          radsim::cmd_calibrate(scene, trajectory, reference_dir, out_config, out_trace, threads);
      std::printf("evaluations=%d best_objective=%.6g\n", r.evaluations, r.best_objective);
    } else if (bench->parsed()) {
      for (const radsim::BenchRow& row : radsim::cmd_bench(scene, samples, repeats, out_csv, threads))
        std::printf("n_samples=%d mean_ms=%.3f std_ms=%.3f\n", row.n_samples, row.mean_ms,
                    row.std_ms);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
