#pragma once

#include <cstdint>
#include <vector>

#include "radsim/imaging.hpp"
#include "radsim/sensor.hpp"

namespace radsim {

// Traces all sampled rays of one intermediate azimuth angle and collects the
// return signals. Each of the N_s samples starts with
// total_emitted_energy / N_s; at every hit the energy is Fresnel-split, up to
// two returns are emitted (back along the travelled path, and through the air
// if the line of sight to the sensor is free), and one reflection plus one
// refraction child are spawned until max_bounces or min_energy cuts them off.
// Randomness is keyed by (seed, azimuth_index, sample), so the result is
// independent of scheduling.
std::vector<ReturnSignal> trace_beam(const Scene& scene, const Pose& sensor_pose,
                                     int azimuth_index, const SensorModel& sensor,
                                     const TraceConfig& cfg, uint64_t seed);

// Raw (noise-free) polar frame: one trace_beam per azimuth, binned into
// columns. Bit-identical for a fixed seed regardless of n_threads
// (0 = hardware concurrency).
PolarImage simulate_frame(const Scene& scene, const Pose& robot_pose,
                          const SensorModel& sensor, const TraceConfig& cfg, uint64_t seed,
                          int n_threads = 0);

}  // namespace radsim
