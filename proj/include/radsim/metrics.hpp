#pragma once

#include "radsim/imaging.hpp"

namespace radsim {

struct MetricConfig {
  int ssim_window = 11;  // odd, >= 3
  double ssim_k1 = 0.01;
  double ssim_k2 = 0.03;
  double dynamic_range = 0.0;  // 0 = derive from the images
  int mi_bins = 64;

  void validate() const;
};

// Mean SSIM over sliding box windows. 1.0 exactly for identical images.
double ssim(const PolarImage& a, const PolarImage& b, const MetricConfig& cfg = {});

// Mutual information in nats from a mi_bins x mi_bins joint histogram; each
// image is min-max scaled independently.
double mutual_information(const PolarImage& a, const PolarImage& b,
                          const MetricConfig& cfg = {});

// Shannon entropy (nats) of the mi_bins marginal histogram.
double entropy(const PolarImage& a, const MetricConfig& cfg = {});

}  // namespace radsim
