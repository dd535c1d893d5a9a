#include "radsim/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace radsim {

void Material::validate() const {
  if (!(velocity > 0.0 && velocity <= kSpeedOfLight))
    throw std::invalid_argument("material '" + name + "': velocity must be in (0, " +
                                std::to_string(kSpeedOfLight) + "] m/ns");
  if (!(A >= 0.0 && A <= 1.0))
    throw std::invalid_argument("material '" + name + "': A must be in [0, 1]");
  if (!(B >= 0.0 && B <= 1.0))
    throw std::invalid_argument("material '" + name + "': B must be in [0, 1]");
  if (!(A + B < 1.0))
    throw std::invalid_argument("material '" + name + "': A+B must be < 1");
  if (!std::isfinite(C))
    throw std::invalid_argument("material '" + name + "': C must be finite");
}

MaterialTable MaterialTable::with_air() {
  MaterialTable table;
  table.items.push_back({"air", kSpeedOfLight, 0.0, 0.0, 1.0});
  return table;
}

const Material& MaterialTable::at(int id) const {
  if (id < 0 || std::size_t(id) >= items.size())
    throw std::out_of_range("material id " + std::to_string(id) + " out of range");
  return items[id];
}

int MaterialTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].name == name) return int(i);
  return -1;
}

int MaterialTable::add(const Material& m) {
  m.validate();
  items.push_back(m);
  return int(items.size()) - 1;
}

Vec3 reflect_dir(const Vec3& v0, const Vec3& n) {
  return v0 - 2.0 * dot(v0, n) * n;
}

std::optional<Vec3> snell_refract(const Vec3& v0, const Vec3& n, double v1, double v2) {
  // sin(theta2)/sin(theta0) = v2/v1, i.e. the classic n1/n2 ratio with n = c/v.
  double ratio = v2 / v1;
  double cos0 = -dot(v0, n);
  double sin2_t = ratio * ratio * std::max(0.0, 1.0 - cos0 * cos0);
  if (sin2_t > 1.0) return std::nullopt;  // total internal reflection
  double cos_t = std::sqrt(1.0 - sin2_t);
  return normalized(ratio * v0 + (ratio * cos0 - cos_t) * n);
}

EnergySplit fresnel_split(double theta0, double v1, double v2, double e0) {
  double n1 = kSpeedOfLight / v1;
  double n2 = kSpeedOfLight / v2;
  double cos0 = std::cos(theta0);
  double sin2_t = (n1 / n2) * (n1 / n2) * (1.0 - cos0 * cos0);
  if (sin2_t > 1.0) return {e0, 0.0};
  double cos_t = std::sqrt(1.0 - sin2_t);
  double rs = (n1 * cos0 - n2 * cos_t) / (n1 * cos0 + n2 * cos_t);
  double rp = (n2 * cos0 - n1 * cos_t) / (n2 * cos0 + n1 * cos_t);
  double r = std::clamp(0.5 * (rs * rs + rp * rp), 0.0, 1.0);
  return {r * e0, (1.0 - r) * e0};
}

double reflection_energy(double e1_total, double omega, const Material& m) {
  double c = std::cos(std::abs(omega));
  if (c < 1e-9) c = 0.0;  // snap so the omega = pi/2 endpoint is exact
  double spec_t = (c > 0.0) ? std::pow(c, m.C) : 0.0;
  // A + B c + (1-A-B) c^C regrouped; at c=1 this is exactly 1, at c=0 exactly A.
  double val = m.A * (1.0 - spec_t) + m.B * (c - spec_t) + spec_t;
  return std::max(val, 0.0) * e1_total;
}

double return_angle_backpath(const Vec3& v0, const Vec3& v1_mean) {
  return angle_between(v1_mean, -v0);
}

double return_angle_airpath(const Vec3& v1_mean, const Vec3& hit_point,
                            const Vec3& sensor_origin) {
  Vec3 back = sensor_origin - hit_point;
  if (norm(back) < 1e-12)
    throw std::domain_error("return_angle_airpath: hit point coincides with the sensor");
  return angle_between(v1_mean, back);
}

double free_space_return_power(double ps, double g, double lambda, double sigma, double r) {
  double four_pi = 4.0 * std::numbers::pi;
  return ps * g * g * lambda * lambda * sigma / (four_pi * four_pi * four_pi * r * r * r * r);
}

}  // namespace radsim
