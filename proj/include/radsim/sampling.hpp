#pragma once

#include "radsim/geometry.hpp"
#include "radsim/rng.hpp"

namespace radsim {

enum class BeamKind { D1, D2, D3, D4 };

// Cone sampler modelling the antenna's focusing mechanism. width_b is the
// full cone width. D1/D2 are uniform samplers confined to the cone; D3/D4
// are normal samplers where inside_prob_P sets the probability of a sample
// landing inside the cone.
struct BeamModel {
  BeamKind kind = BeamKind::D3;
  double width_b = 0.17453292519943295;  // 10 deg
  double inside_prob_P = 0.9;
  int n_samples = 50;

  void validate() const;
};

// Ray direction relative to the beam axis, (azimuth, inclination) in radians.
struct AngularOffset {
  double azimuth = 0.0;
  double inclination = 0.0;
};

// x with erf(x) = p, |erf(x) - p| < 1e-12. Throws std::domain_error unless |p| < 1.
double inverse_erf(double p);

// Standard normal draw via the inverse CDF, sqrt(2)*erfinv(2u-1).
double draw_normal(Rng& rng);

double sample_radius(BeamKind kind, double width_b, double inside_prob, Rng& rng);

AngularOffset sample_offset(const BeamModel& beam, Rng& rng);

// Rotates the boresight by the angular offset. The offset is interpreted in
// polar form (r, omega): the result lies at angle r from the boresight, tilted
// toward the azimuth tangent (cos omega) and the inclination tangent
// (sin omega). Positive azimuth is counter-clockwise seen from up_hint;
// positive inclination tilts toward up_hint. Offset (0,0) returns the
// boresight exactly.
Vec3 offset_to_direction(const Vec3& boresight, const Vec3& up_hint, const AngularOffset& off);

}  // namespace radsim
