#include "radsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace radsim {

void MetricConfig::validate() const {
  if (ssim_window < 3 || ssim_window % 2 == 0)
    throw std::invalid_argument("metrics: ssim_window must be odd and >= 3");
  if (!(ssim_k1 > 0.0 && ssim_k2 > 0.0))
    throw std::invalid_argument("metrics: k1 and k2 must be > 0");
  if (mi_bins < 2) throw std::invalid_argument("metrics: mi_bins must be >= 2");
}

namespace {

void check_dims(const PolarImage& a, const PolarImage& b) {
  if (a.n_azimuth != b.n_azimuth || a.n_range_bins != b.n_range_bins)
    throw std::invalid_argument("metrics: image dimensions differ");
}

struct Extrema {
  double lo, hi;
};

Extrema extrema(const PolarImage& img) {
  double lo = img.data.empty() ? 0.0 : img.data[0];
  double hi = lo;
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

// Summed-area table, (w+1) x (h+1), sat[x][y] = sum over [0,x) x [0,y).
struct Sat {
  int w, h;
  std::vector<double> s;

  template <typename F>
  Sat(int w_, int h_, F value) : w(w_), h(h_), s(std::size_t(w + 1) * (h + 1), 0.0) {
    for (int x = 0; x < w; ++x) {
      double run = 0.0;
      for (int y = 0; y < h; ++y) {
        run += value(x, y);
        at(x + 1, y + 1) = at(x, y + 1) + run;
      }
    }
  }
  double& at(int x, int y) { return s[std::size_t(x) * (h + 1) + y]; }
  double at(int x, int y) const { return s[std::size_t(x) * (h + 1) + y]; }
  double window(int x0, int y0, int n) const {
    return at(x0 + n, y0 + n) - at(x0, y0 + n) - at(x0 + n, y0) + at(x0, y0);
  }
};

std::vector<int> histogram_bins(const PolarImage& img, int bins) {
  Extrema e = extrema(img);
  std::vector<int> out(img.data.size());
  double span = e.hi - e.lo;
  if (span <= 0.0) return out;  // constant image: everything in bin 0
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    int b = int((img.data[i] - e.lo) / span * bins);
    out[i] = std::clamp(b, 0, bins - 1);
  }
  return out;
}

}  // namespace

double ssim(const PolarImage& a, const PolarImage& b, const MetricConfig& cfg) {
  cfg.validate();
  check_dims(a, b);
  const int w = a.n_azimuth, h = a.n_range_bins, win = cfg.ssim_window;
  if (w < win || h < win)
    throw std::invalid_argument("metrics: image smaller than the SSIM window");

  double dynamic_range = cfg.dynamic_range;
  if (dynamic_range <= 0.0) {
    Extrema ea = extrema(a), eb = extrema(b);
    dynamic_range = std::max(ea.hi - ea.lo, eb.hi - eb.lo);
    // Constant inputs: fall back to their magnitude so the constants stay finite.
    if (dynamic_range <= 0.0)
      dynamic_range = std::max({std::abs(ea.hi), std::abs(eb.hi), std::abs(ea.lo),
                                std::abs(eb.lo)});
    if (dynamic_range <= 0.0) dynamic_range = 1.0;
  }
  const double c1 = (cfg.ssim_k1 * dynamic_range) * (cfg.ssim_k1 * dynamic_range);
  const double c2 = (cfg.ssim_k2 * dynamic_range) * (cfg.ssim_k2 * dynamic_range);

  Sat sa(w, h, [&](int x, int y) { return a.at(x, y); });
  Sat sb(w, h, [&](int x, int y) { return b.at(x, y); });
  Sat saa(w, h, [&](int x, int y) { return a.at(x, y) * a.at(x, y); });
  Sat sbb(w, h, [&](int x, int y) { return b.at(x, y) * b.at(x, y); });
  Sat sab(w, h, [&](int x, int y) { return a.at(x, y) * b.at(x, y); });

  const double n = double(win) * win;
  double total = 0.0;
  std::size_t count = 0;
  for (int x = 0; x + win <= w; ++x) {
    for (int y = 0; y + win <= h; ++y) {
      double mu_a = sa.window(x, y, win) / n;
      double mu_b = sb.window(x, y, win) / n;
      double var_a = saa.window(x, y, win) / n - mu_a * mu_a;
      double var_b = sbb.window(x, y, win) / n - mu_b * mu_b;
      double cov = sab.window(x, y, win) / n - mu_a * mu_b;
      double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
      double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
      ++count;
    }
  }
  return total / double(count);
}

double mutual_information(const PolarImage& a, const PolarImage& b, const MetricConfig& cfg) {
  cfg.validate();
  check_dims(a, b);
  const int bins = cfg.mi_bins;
  std::vector<int> ba = histogram_bins(a, bins);
  std::vector<int> bb = histogram_bins(b, bins);

  // Integer counts, probabilities formed by one division each: a constant
  // image lands in one bin with p exactly 1, so MI(x, x) equals H(x) exactly.
  std::vector<int64_t> joint(std::size_t(bins) * bins, 0);
  std::vector<int64_t> ca(bins, 0), cb(bins, 0);
  for (std::size_t i = 0; i < ba.size(); ++i) {
    joint[std::size_t(ba[i]) * bins + bb[i]]++;
    ca[ba[i]]++;
    cb[bb[i]]++;
  }

  const double n = double(ba.size());
  double mi = 0.0;
  for (int x = 0; x < bins; ++x)
    for (int y = 0; y < bins; ++y) {
      int64_t count = joint[std::size_t(x) * bins + y];
      if (count == 0) continue;
      double pxy = double(count) / n;
      double px = double(ca[x]) / n;
      double py = double(cb[y]) / n;
      mi += pxy * (std::log(pxy) - std::log(px) - std::log(py));
    }
  return mi;
}

double entropy(const PolarImage& a, const MetricConfig& cfg) {
  cfg.validate();
  const int bins = cfg.mi_bins;
  std::vector<int> ba = histogram_bins(a, bins);
  std::vector<int64_t> counts(bins, 0);
  for (int b : ba) counts[b]++;

  const double n = double(ba.size());
  double h = 0.0;
  for (int x = 0; x < bins; ++x) {
    if (counts[x] == 0) continue;
    double p = double(counts[x]) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace radsim
