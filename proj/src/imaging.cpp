#include "radsim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "radsim/rng.hpp"

namespace radsim {

std::vector<double> bin_signals(const std::vector<ReturnSignal>& signals,
                                const SensorModel& sensor) {
  std::vector<double> column(sensor.n_range_bins, 0.0);
  for (const ReturnSignal& s : signals) {
    if (!std::isfinite(s.apparent_range) || s.apparent_range < 0.0) continue;
    int bin = int(std::floor(s.apparent_range / sensor.range_resolution));
    if (bin < 0 || bin >= sensor.n_range_bins) continue;
    column[bin] += s.energy;
  }
  return column;
}

PolarImage apply_range_blur(const PolarImage& img, double sigma_bins) {
  if (sigma_bins < 0.0) throw std::invalid_argument("blur: sigma must be >= 0");
  if (sigma_bins == 0.0) return img;

  int radius = int(std::ceil(4.0 * sigma_bins));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma_bins * sigma_bins));

  PolarImage out(img.n_azimuth, img.n_range_bins, img.range_resolution);
  out.timestamp = img.timestamp;
  out.seed = img.seed;

  const int h = img.n_range_bins;
  for (int a = 0; a < img.n_azimuth; ++a) {
    const double* src = img.data.data() + std::size_t(a) * h;
    double* dst = out.data.data() + std::size_t(a) * h;
    for (int r = 0; r < h; ++r) {
      if (src[r] == 0.0) continue;
      int k0 = std::max(-radius, -r);
      int k1 = std::min(radius, h - 1 - r);
      double wsum = 0.0;
      for (int k = k0; k <= k1; ++k) wsum += kernel[k + radius];
      // Scatter with in-bounds renormalization: each source bin keeps its mass.
      double scale = src[r] / wsum;
      for (int k = k0; k <= k1; ++k) dst[r + k] += kernel[k + radius] * scale;
    }
  }
  return out;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Fixed gradient set so results do not depend on libm trig.
constexpr double kGrad[8][2] = {
    {1.0, 0.0},        {-1.0, 0.0},        {0.0, 1.0},          {0.0, -1.0},
    {kInvSqrt2, kInvSqrt2}, {-kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}, {-kInvSqrt2, -kInvSqrt2}};

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
inline double lerp(double a, double b, double t) { return a + t * (b - a); }

inline double corner_dot(int64_t ix, int64_t iy, double dx, double dy, uint64_t seed) {
  uint64_t h = mix64(seed ^ mix64(uint64_t(ix) * 0x9e3779b97f4a7c15ull ^
                                  mix64(uint64_t(iy) + 0xbf58476d1ce4e5b9ull)));
  const double* g = kGrad[h & 7];
  return g[0] * dx + g[1] * dy;
}

}  // namespace

double perlin2(double x, double y, uint64_t seed) {
  double fx = std::floor(x);
  double fy = std::floor(y);
  int64_t ix = int64_t(fx);
  int64_t iy = int64_t(fy);
  double dx = x - fx;
  double dy = y - fy;

  double d00 = corner_dot(ix, iy, dx, dy, seed);
  double d10 = corner_dot(ix + 1, iy, dx - 1.0, dy, seed);
  double d01 = corner_dot(ix, iy + 1, dx, dy - 1.0, seed);
  double d11 = corner_dot(ix + 1, iy + 1, dx - 1.0, dy - 1.0, seed);

  double u = fade(dx);
  double v = fade(dy);
  // Unit gradients bound the raw value by sqrt(2)/2; rescale to [-1, 1].
  return std::numbers::sqrt2 * lerp(lerp(d00, d10, u), lerp(d01, d11, u), v);
}

namespace {

void add_noise_stage(PolarImage& img, const NoiseStage& stage, uint64_t seed, uint64_t stage_id) {
  if (stage.kind == NoiseKind::none || stage.amplitude == 0.0) return;
  if (stage.amplitude < 0.0) throw std::invalid_argument("noise: amplitude must be >= 0");

  if (stage.kind == NoiseKind::uniform) {
    for (int a = 0; a < img.n_azimuth; ++a)
      for (int r = 0; r < img.n_range_bins; ++r) {
        // Keyed by cell so the value is independent of iteration order.
        Rng rng = Rng::keyed(seed, stage_id, uint64_t(a), uint64_t(r));
        img.at(a, r) += stage.amplitude * rng.uniform();
      }
  } else {
    uint64_t stage_seed = mix64(seed + stage_id);
    for (int a = 0; a < img.n_azimuth; ++a)
      for (int r = 0; r < img.n_range_bins; ++r) {
        double n = perlin2(a * stage.freq_az, r * stage.freq_range, stage_seed);
        img.at(a, r) += stage.amplitude * 0.5 * (n + 1.0);
      }
  }
}

}  // namespace

PolarImage add_noise(const PolarImage& img, const NoiseConfig& cfg) {
  PolarImage out = apply_range_blur(img, cfg.range_blur_sigma);
  add_noise_stage(out, cfg.system, cfg.noise_seed, 1);
  add_noise_stage(out, cfg.ambient, cfg.noise_seed, 2);
  for (double& v : out.data) v = std::max(v, 0.0);
  return out;
}

QuantizedImage quantize(const PolarImage& img, int bit_depth, QuantScale scale, double v_scale) {
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("quantize: bit_depth must be 8 or 16");
  if (!(v_scale > 0.0)) throw std::invalid_argument("quantize: v_scale must be > 0");

  double v_max = 0.0;
  for (double v : img.data) v_max = std::max(v_max, v);
  if (v_max <= 0.0) v_max = 1.0;  // all-zero image maps to all-zero output

  const double q_max = double((1u << bit_depth) - 1);
  const double log_denom = std::log1p(v_max / v_scale);

  QuantizedImage out;
  out.width = img.n_azimuth;
  out.height = img.n_range_bins;
  out.bit_depth = bit_depth;
  out.data.resize(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    double v = std::max(img.data[i], 0.0);
    double u = scale == QuantScale::linear ? v / v_max : std::log1p(v / v_scale) / log_denom;
    u = std::clamp(u, 0.0, 1.0);
    out.data[i] = uint16_t(std::lround(u * q_max));
  }
  return out;
}

void write_pgm(const QuantizedImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  int maxval = img.bit_depth == 8 ? 255 : 65535;
  f << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  std::vector<unsigned char> row(std::size_t(img.width) * (img.bit_depth == 8 ? 1 : 2));
  for (int r = 0; r < img.height; ++r) {
    std::size_t o = 0;
    for (int a = 0; a < img.width; ++a) {
      uint16_t v = img.at(a, r);
      if (img.bit_depth == 16) row[o++] = (unsigned char)(v >> 8);  // big-endian
      row[o++] = (unsigned char)(v & 0xff);
    }
    f.write(reinterpret_cast<const char*>(row.data()), std::streamsize(o));
  }
  if (!f) throw std::runtime_error("write_pgm: short write to " + path);
}

namespace {

[[noreturn]] void pgm_fail(const std::string& path, std::size_t offset, const std::string& what) {
  throw std::runtime_error("read_pgm: " + path + ": " + what + " at byte " +
                           std::to_string(offset));
}

}  // namespace

QuantizedImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      char c = bytes[pos];
      if (c == '#') {  // comment to end of line
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* what) {
    skip_space();
    std::size_t start = pos;
    long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1 << 30) pgm_fail(path, start, std::string(what) + " out of range");
      ++pos;
    }
    if (pos == start) pgm_fail(path, pos, std::string("expected ") + what);
    return value;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') pgm_fail(path, 0, "not a P5 file");
  pos = 2;
  long width = read_int("width");
  long height = read_int("height");
  long maxval = read_int("maxval");
  if (width <= 0 || height <= 0) pgm_fail(path, pos, "bad dimensions");
  if (maxval <= 0 || maxval > 65535) pgm_fail(path, pos, "bad maxval");
  if (pos >= bytes.size()) pgm_fail(path, pos, "missing pixel data");
  char sep = bytes[pos++];
  if (sep != '\n' && sep != ' ' && sep != '\t' && sep != '\r')
    pgm_fail(path, pos - 1, "expected whitespace after maxval");

  int bytes_per = maxval > 255 ? 2 : 1;
  std::size_t need = std::size_t(width) * std::size_t(height) * bytes_per;
  if (bytes.size() - pos < need)
    pgm_fail(path, bytes.size(), "truncated pixel data (need " + std::to_string(need) + " bytes)");

  QuantizedImage out;
  out.width = int(width);
  out.height = int(height);
  out.bit_depth = maxval > 255 ? 16 : 8;
  out.data.resize(std::size_t(width) * height);
  for (long r = 0; r < height; ++r) {
    for (long a = 0; a < width; ++a) {
      uint16_t v;
      if (bytes_per == 2) {
        v = uint16_t((unsigned char)bytes[pos] << 8 | (unsigned char)bytes[pos + 1]);
        pos += 2;
      } else {
        v = (unsigned char)bytes[pos++];
      }
      out.data[std::size_t(a) * height + r] = v;
    }
  }
  return out;
}

PolarImage to_double_image(const QuantizedImage& img) {
  PolarImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = double(img.data[i]);
  return out;
}

}  // namespace radsim
