#pragma once

#include <optional>
#include <utility>

#include "radsim/bvh.hpp"
#include "radsim/geometry.hpp"
#include "radsim/sampling.hpp"
#include "radsim/wave.hpp"

namespace radsim {

struct TraceConfig {
  int max_bounces = 4;
  double min_energy = 1e-4;  // fraction of the initial per-ray energy
  double total_emitted_energy = 1.0;
  bool return_leg_attenuation = false;
  bool lidar_like = false;
  double f_rx = 0.05;  // receiver aperture fraction applied to every return

  void validate() const;
};

struct ReturnSignal {
  double apparent_range = 0.0;  // meters, half the total travel distance
  double energy = 0.0;
};

struct SensorModel {
  int n_azimuth = 400;
  double range_resolution = 0.05;  // meters per bin
  int n_range_bins = 400;
  BeamModel beam;
  Pose mount;  // relative to the robot body

  double max_range() const { return range_resolution * n_range_bins; }
  void validate() const;
};

// Immutable world: geometry plus materials. accel is absent for empty scenes.
struct Scene {
  TriangleMesh mesh;
  MaterialTable materials = MaterialTable::with_air();
  std::optional<AccelIndex> accel;
};

// Validates material ids, drops degenerate triangles, builds the BVH.
Scene make_scene(TriangleMesh mesh, MaterialTable materials);

}  // namespace radsim
