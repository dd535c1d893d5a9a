#include "radsim/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace radsim {

void BeamModel::validate() const {
  if (!(width_b > 0.0 && width_b < std::numbers::pi))
    throw std::invalid_argument("beam: width_b must be in (0, pi)");
  if (kind == BeamKind::D3 || kind == BeamKind::D4) {
    if (!(inside_prob_P > 0.0 && inside_prob_P < 1.0))
      throw std::invalid_argument("beam: inside_prob_P must be in (0, 1)");
  }
  if (n_samples < 1) throw std::invalid_argument("beam: n_samples must be >= 1");
}

double inverse_erf(double p) {
  if (!(std::abs(p) < 1.0)) throw std::domain_error("inverse_erf: |p| must be < 1");
  if (p == 0.0) return 0.0;
  double a = std::abs(p);

  // Winitzki approximation as the start, good to ~2e-3.
  constexpr double k = 0.147;
  double ln1p2 = std::log1p(-a * a);
  double t = 2.0 / (std::numbers::pi * k) + 0.5 * ln1p2;
  double x = std::sqrt(std::sqrt(t * t - ln1p2 / k) - t);

  // Newton against libm erf; the erfc form keeps precision in the tail.
  constexpr double kSqrtPiOver2 = 0.88622692545275801364908374167057259140;
  for (int i = 0; i < 6; ++i) {
    double err = (a <= 0.9) ? std::erf(x) - a : (1.0 - a) - std::erfc(x);
    x -= err * kSqrtPiOver2 * std::exp(x * x);
  }
  return p < 0.0 ? -x : x;
}

double draw_normal(Rng& rng) {
  // ((u64 >> 11) + 0.5) * 2^-52 - 1 is strictly inside (-1, 1).
  double p = (double(rng.next_u64() >> 11) + 0.5) * 0x1.0p-52 - 1.0;
  return std::numbers::sqrt2 * inverse_erf(p);
}

double sample_radius(BeamKind kind, double width_b, double inside_prob, Rng& rng) {
  const double half = 0.5 * width_b;
  switch (kind) {
    case BeamKind::D1:
      return rng.uniform() * half;
    case BeamKind::D2:
      return std::sqrt(rng.uniform()) * half;
    case BeamKind::D3: {
      if (!(inside_prob > 0.0 && inside_prob < 1.0))
        throw std::invalid_argument("sample_radius: inside_prob must be in (0, 1)");
      return draw_normal(rng) * half / (std::numbers::sqrt2 * inverse_erf(inside_prob));
    }
    case BeamKind::D4: {
      if (!(inside_prob > 0.0 && inside_prob < 1.0))
        throw std::invalid_argument("sample_radius: inside_prob must be in (0, 1)");
      double n = draw_normal(rng);
      return std::sqrt(std::abs(n) * half * half /
                       (std::numbers::sqrt2 * inverse_erf(inside_prob)));
    }
  }
  throw std::invalid_argument("sample_radius: unknown beam kind");
}

AngularOffset sample_offset(const BeamModel& beam, Rng& rng) {
  double omega = rng.uniform(-std::numbers::pi, std::numbers::pi);
  double r = sample_radius(beam.kind, beam.width_b, beam.inside_prob_P, rng);
  return {r * std::cos(omega), r * std::sin(omega)};
}

Vec3 offset_to_direction(const Vec3& boresight, const Vec3& up_hint, const AngularOffset& off) {
  double r = std::hypot(off.azimuth, off.inclination);
  if (r == 0.0) return boresight;

  Vec3 e_az = cross(up_hint, boresight);
  double n = norm(e_az);
  if (n < 1e-9) throw std::invalid_argument("offset_to_direction: up_hint parallel to boresight");
  e_az = e_az / n;
  Vec3 e_inc = cross(boresight, e_az);

  double omega = std::atan2(off.inclination, off.azimuth);
  Vec3 tangent = std::cos(omega) * e_az + std::sin(omega) * e_inc;
  return std::cos(r) * boresight + std::sin(r) * tangent;
}

}  // namespace radsim
