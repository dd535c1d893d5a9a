#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radsim/geometry.hpp"

namespace radsim {

inline constexpr double kSpeedOfLight = 0.299792458;  // m/ns

// Surface/medium behaviour: wave velocity inside the medium plus the three
// reflection-lobe parameters. A is an angle-independent floor, B the
// Lambertian diffuse factor, and the specular share S = 1 - A - B falls off
// as cos(omega)^C.
struct Material {
  std::string name;
  double velocity = kSpeedOfLight;
  double A = 0.0;
  double B = 0.0;
  double C = 1.0;

  double specular() const { return 1.0 - A - B; }
  void validate() const;  // throws std::invalid_argument naming the field
};

// Index 0 is always air.
struct MaterialTable {
  std::vector<Material> items;

  static MaterialTable with_air();
  const Material& at(int id) const;
  int index_of(const std::string& name) const;  // -1 if absent
  int add(const Material& m);
};

struct EnergySplit {
  double reflected = 0.0;
  double refracted = 0.0;
};

// Mirror reflection about the surface normal. Requires dot(v0, n) < 0.
Vec3 reflect_dir(const Vec3& v0, const Vec3& n);

// Transmitted direction with sin(theta2) = sin(theta0) * v2/v1, or nullopt
// under total internal reflection.
std::optional<Vec3> snell_refract(const Vec3& v0, const Vec3& n, double v1, double v2);

// Unpolarized Fresnel power split of e0 at incidence theta0 between media of
// wave velocities v1 (incident side) and v2. Conserves energy exactly; under
// TIR everything reflects.
EnergySplit fresnel_split(double theta0, double v1, double v2, double e0);

// Reflected energy observed at angle omega off the mean reflection:
// e1 * (A + B cos w + (1-A-B) cos(w)^C), clamped below at zero. The terms are
// grouped so omega = 0 yields exactly e1 and omega = pi/2 exactly A*e1.
double reflection_energy(double e1_total, double omega, const Material& m);

// Angle between the mean reflection and the reversed incidence direction
// (the return direction when emitter and receiver share a location).
double return_angle_backpath(const Vec3& v0, const Vec3& v1_mean);

// Angle between the mean reflection and the straight line back to the sensor.
double return_angle_airpath(const Vec3& v1_mean, const Vec3& hit_point, const Vec3& sensor_origin);

// Radar range equation: Pe = Ps G^2 lambda^2 sigma / ((4 pi)^3 R^4). Used as
// a far-field oracle against the sampled model.
double free_space_return_power(double ps, double g, double lambda, double sigma, double r);

}  // namespace radsim
