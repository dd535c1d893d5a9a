#include "radsim/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace radsim {

void TraceConfig::validate() const {
  if (max_bounces < 1) throw std::invalid_argument("trace: max_bounces must be >= 1");
  if (!(min_energy > 0.0)) throw std::invalid_argument("trace: min_energy must be > 0");
  if (!(total_emitted_energy > 0.0))
    throw std::invalid_argument("trace: total_emitted_energy must be > 0");
  if (!(f_rx > 0.0 && f_rx <= 1.0)) throw std::invalid_argument("trace: f_rx must be in (0, 1]");
}

void SensorModel::validate() const {
  if (n_azimuth < 1) throw std::invalid_argument("sensor: n_azimuth must be >= 1");
  if (!(range_resolution > 0.0))
    throw std::invalid_argument("sensor: range_resolution must be > 0");
  if (n_range_bins < 1) throw std::invalid_argument("sensor: n_range_bins must be >= 1");
  beam.validate();
}

Scene make_scene(TriangleMesh mesh, MaterialTable materials) {
  validate_mesh(mesh);
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    int id = mesh.triangles[i].material_id;
    if (id < 0 || std::size_t(id) >= materials.items.size())
      throw std::invalid_argument("scene: triangle " + std::to_string(i) +
                                  " has unknown material id " + std::to_string(id));
  }
  Scene scene;
  scene.mesh = std::move(mesh);
  scene.materials = std::move(materials);

  bool any_area = false;
  for (const Triangle& t : scene.mesh.triangles)
    if (triangle_area(scene.mesh, t) > 0.0) { any_area = true; break; }
  if (any_area) scene.accel.emplace(scene.mesh);
  return scene;
}

namespace {

constexpr double kSelfHitBias = 1e-4;  // m, secondary-ray origin offset
constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct PathState {
  Vec3 origin;
  Vec3 dir;
  double energy = 0.0;
  double path_len = 0.0;
  int medium = 0;  // material id the ray travels in, 0 = air
  int bounce = 0;  // hits so far
};

struct BeamContext {
  const Scene* scene;
  const TraceConfig* cfg;
  Vec3 sensor_pos;
  double max_range;
  double min_energy_abs;
  std::vector<ReturnSignal>* out;
};

inline double attenuation(const TraceConfig& cfg, double leg_m) {
  if (!cfg.return_leg_attenuation) return 1.0;
  double leg = std::max(leg_m, kSelfHitBias);
  return 1.0 / (leg * leg);
}

void trace_path(const BeamContext& ctx, PathState start) {
  const Scene& scene = *ctx.scene;
  const TraceConfig& cfg = *ctx.cfg;

  PathState stack[64];
  int top = 0;
  stack[top++] = start;

  while (top > 0) {
    PathState s = stack[--top];
    double t_min = s.bounce == 0 ? 0.0 : kSelfHitBias;
    auto hit = scene.accel->intersect(s.origin, s.dir, t_min,
                                      std::numeric_limits<double>::infinity());
    if (!hit) continue;

    double path_here = s.path_len + hit->t;
    if (0.5 * path_here > ctx.max_range) continue;  // no descendant can land in range
    int bounce = s.bounce + 1;

    if (cfg.lidar_like) {
      // Baseline preset: first-hit range only, reflectance pinned to 1.
      double e = s.energy * cfg.f_rx * attenuation(cfg, path_here);
      if (path_here <= ctx.max_range && e > 0.0)
        ctx.out->push_back({path_here, e});
      continue;
    }

    const Material& surface = scene.materials.at(hit->material_id);
    bool in_air = (s.medium == 0);
    double vel_cur = scene.materials.at(s.medium).velocity;
    double vel_next = in_air ? surface.velocity : kSpeedOfLight;

    double cos0 = std::clamp(-dot(s.dir, hit->normal), 0.0, 1.0);
    double theta0 = std::acos(cos0);
    EnergySplit split = fresnel_split(theta0, vel_cur, vel_next, s.energy);

    Vec3 refl = reflect_dir(s.dir, hit->normal);
    std::optional<Vec3> trans = snell_refract(s.dir, hit->normal, vel_cur, vel_next);

    // The share that can head back to the sensor: in air it is the reflected
    // lobe around the mirror direction; inside a medium it is the refracted
    // lobe around the transmission direction (the part that exits). Emitted
    // returns are debited from the child that carries that share.
    double return_share = in_air ? split.reflected : (trans ? split.refracted : 0.0);
    Vec3 lobe_center = in_air ? refl : (trans ? *trans : refl);

    double debit = 0.0;
    if (return_share > 0.0) {
      double w_back = std::clamp(return_angle_backpath(s.dir, lobe_center), 0.0, kHalfPi);
      // Both returns draw on the same lobe share; cap them so the hit never
      // hands out more than it received.
      double e_back = std::min(reflection_energy(return_share, w_back, surface) * cfg.f_rx,
                               return_share);
      if (e_back > 0.0) {
        debit += e_back;
        double apparent = path_here;  // (out + retraced leg) / 2
        if (apparent <= ctx.max_range)
          ctx.out->push_back({apparent, e_back * attenuation(cfg, path_here)});
      }

      Vec3 to_sensor = ctx.sensor_pos - hit->point;
      double d = norm(to_sensor);
      if (d > 1e-9 && !scene.accel->occluded(hit->point, ctx.sensor_pos)) {
        double w_air =
            std::clamp(return_angle_airpath(lobe_center, hit->point, ctx.sensor_pos), 0.0, kHalfPi);
        double e_air = std::min(reflection_energy(return_share, w_air, surface) * cfg.f_rx,
                                return_share - debit);
        if (e_air > 0.0) {
          debit += e_air;
          double apparent = 0.5 * (path_here + d);
          if (apparent <= ctx.max_range)
            ctx.out->push_back({apparent, e_air * attenuation(cfg, d)});
        }
      }
    }

    if (bounce >= cfg.max_bounces || top + 2 > int(std::size(stack))) continue;

    double e_refl = split.reflected - (in_air ? debit : 0.0);
    if (e_refl >= ctx.min_energy_abs) {
      stack[top++] = {hit->point, refl, e_refl, path_here, s.medium, bounce};
    }
    if (trans) {
      double e_refr = split.refracted - (in_air ? 0.0 : debit);
      if (e_refr >= ctx.min_energy_abs) {
        stack[top++] = {hit->point, *trans, e_refr, path_here, in_air ? hit->material_id : 0,
                        bounce};
      }
    }
  }
}

}  // namespace

std::vector<ReturnSignal> trace_beam(const Scene& scene, const Pose& sensor_pose,
                                     int azimuth_index, const SensorModel& sensor,
                                     const TraceConfig& cfg, uint64_t seed) {
  sensor.validate();
  cfg.validate();
  if (azimuth_index < 0 || azimuth_index >= sensor.n_azimuth)
    throw std::invalid_argument("trace_beam: azimuth_index out of range");

  std::vector<ReturnSignal> out;
  if (!scene.accel) return out;

  double az = 2.0 * std::numbers::pi * azimuth_index / sensor.n_azimuth;
  Vec3 boresight = sensor_pose.rotate({std::cos(az), std::sin(az), 0.0});
  Vec3 up = sensor_pose.rotate({0.0, 0.0, 1.0});

  int n_samples = cfg.lidar_like ? 1 : sensor.beam.n_samples;
  double per_ray = cfg.total_emitted_energy / n_samples;

  BeamContext ctx{&scene, &cfg, sensor_pose.position, sensor.max_range(),
                  cfg.min_energy * per_ray, &out};

  for (int i = 0; i < n_samples; ++i) {
    Vec3 dir = boresight;
    if (!cfg.lidar_like) {  // lidar-like casts only the mean ray
      Rng rng = Rng::keyed(seed, uint64_t(azimuth_index), uint64_t(i));
      dir = offset_to_direction(boresight, up, sample_offset(sensor.beam, rng));
    }
    trace_path(ctx, {sensor_pose.position, dir, per_ray, 0.0, 0, 0});
  }
  return out;
}

PolarImage simulate_frame(const Scene& scene, const Pose& robot_pose, const SensorModel& sensor,
                          const TraceConfig& cfg, uint64_t seed, int n_threads) {
  sensor.validate();
  cfg.validate();

  PolarImage img(sensor.n_azimuth, sensor.n_range_bins, sensor.range_resolution);
  img.seed = seed;

  Pose sensor_pose = robot_pose * sensor.mount;

  if (n_threads <= 0) n_threads = int(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, sensor.n_azimuth);

  auto work = [&](int first) {
    // Column content depends only on (seed, azimuth), never on the thread.
    for (int a = first; a < sensor.n_azimuth; a += n_threads) {
      std::vector<ReturnSignal> signals = trace_beam(scene, sensor_pose, a, sensor, cfg, seed);
      std::vector<double> column = bin_signals(signals, sensor);
      std::copy(column.begin(), column.end(), img.data.begin() + std::size_t(a) * sensor.n_range_bins);
    }
  };

  if (n_threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
    for (std::thread& t : pool) t.join();
  }
  return img;
}

}  // namespace radsim
