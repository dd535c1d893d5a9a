#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radsim/sensor.hpp"

namespace radsim {

// Polar intensity frame: one column per azimuth step, one row per range bin.
// Stored column-major so a column is contiguous.
struct PolarImage {
  int n_azimuth = 0;
  int n_range_bins = 0;
  double range_resolution = 0.0;
  double timestamp = 0.0;
  uint64_t seed = 0;
  std::vector<double> data;

  PolarImage() = default;
  PolarImage(int azimuth, int bins, double resolution = 0.0)
      : n_azimuth(azimuth),
        n_range_bins(bins),
        range_resolution(resolution),
        data(std::size_t(azimuth) * std::size_t(bins), 0.0) {}

  double& at(int a, int r) { return data[std::size_t(a) * n_range_bins + r]; }
  double at(int a, int r) const { return data[std::size_t(a) * n_range_bins + r]; }
};

enum class NoiseKind { none, uniform, perlin };

struct NoiseStage {
  NoiseKind kind = NoiseKind::none;
  double amplitude = 0.0;
  double freq_az = 0.1;
  double freq_range = 0.05;
};

// Post-processing applied to a raw frame, in fixed order:
// range blur -> system noise -> ambient noise.
struct NoiseConfig {
  double range_blur_sigma = 2.0;  // bins
  NoiseStage system;
  NoiseStage ambient{NoiseKind::perlin, 0.0, 0.1, 0.05};
  uint64_t noise_seed = 0;
};

// floor(apparent_range / range_resolution) accumulation; out-of-range
// signals are dropped.
std::vector<double> bin_signals(const std::vector<ReturnSignal>& signals,
                                const SensorModel& sensor);

// 1-D Gaussian along the range axis, kernel truncated at 4 sigma and
// renormalized so every column keeps its total energy. sigma 0 is identity.
PolarImage apply_range_blur(const PolarImage& img, double sigma_bins);

// Classic 2-D gradient-lattice noise with quintic fade, in [-1, 1], zero at
// integer lattice points. Gradients are hashed from (seed, cell), so values
// are reproducible across platforms and iteration orders.
double perlin2(double x, double y, uint64_t seed);

PolarImage add_noise(const PolarImage& img, const NoiseConfig& cfg);

struct QuantizedImage {
  int width = 0;   // azimuth columns
  int height = 0;  // range bins
  int bit_depth = 16;
  std::vector<uint16_t> data;  // column-major, like PolarImage

  uint16_t at(int a, int r) const { return data[std::size_t(a) * height + r]; }
};

enum class QuantScale { linear, log_scale };

QuantizedImage quantize(const PolarImage& img, int bit_depth, QuantScale scale,
                        double v_scale = 1.0);

// Binary PGM (P5); 16-bit samples are big-endian. read(write(x)) == x.
void write_pgm(const QuantizedImage& img, const std::string& path);
QuantizedImage read_pgm(const std::string& path);

PolarImage to_double_image(const QuantizedImage& img);

}  // namespace radsim
