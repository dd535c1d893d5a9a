#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace radsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 operator*(double s, const Vec3& a) { return a * s; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

// Angle between two vectors in [0, pi]; inputs need not be unit length.
inline double angle_between(const Vec3& a, const Vec3& b) {
  double c = dot(a, b) / (norm(a) * norm(b));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

struct Quat {
  double x = 0.0, y = 0.0, z = 0.0, w = 1.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
  Quat normalized() const {
    double n = norm();
    return {x / n, y / n, z / n, w / n};
  }
  Quat conjugate() const { return {-x, -y, -z, w}; }

  Vec3 rotate(const Vec3& v) const {
    Vec3 u{x, y, z};
    Vec3 t = 2.0 * cross(u, v);
    return v + w * t + cross(u, t);
  }

  static Quat from_axis_angle(const Vec3& axis, double angle) {
    Vec3 u = axis / radsim::norm(axis);
    double s = std::sin(0.5 * angle);
    return {u.x * s, u.y * s, u.z * s, std::cos(0.5 * angle)};
  }
};

inline Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
          a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z};
}

struct Pose {
  Vec3 position;
  Quat orientation;

  Vec3 transform_point(const Vec3& p) const { return position + orientation.rotate(p); }
  Vec3 rotate(const Vec3& d) const { return orientation.rotate(d); }
};

inline Pose operator*(const Pose& a, const Pose& b) {
  return {a.transform_point(b.position), (a.orientation * b.orientation).normalized()};
}

struct Triangle {
  uint32_t v0 = 0, v1 = 0, v2 = 0;
  int material_id = 0;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
};

double triangle_area(const TriangleMesh& mesh, const Triangle& t);

// Throws std::invalid_argument if a triangle references a vertex out of range.
void validate_mesh(const TriangleMesh& mesh);

struct RayHit {
  double t = 0.0;
  Vec3 point;
  Vec3 normal;  // unit, oriented against the ray direction
  int triangle_id = -1;
  int material_id = 0;
};

}  // namespace radsim
