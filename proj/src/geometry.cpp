#include "radsim/geometry.hpp"

#include <stdexcept>
#include <string>

namespace radsim {

double triangle_area(const TriangleMesh& mesh, const Triangle& t) {
  const Vec3& a = mesh.vertices[t.v0];
  const Vec3& b = mesh.vertices[t.v1];
  const Vec3& c = mesh.vertices[t.v2];
  return 0.5 * norm(cross(b - a, c - a));
}

void validate_mesh(const TriangleMesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Triangle& t = mesh.triangles[i];
    if (t.v0 >= n || t.v1 >= n || t.v2 >= n) {
      throw std::invalid_argument("mesh: triangle " + std::to_string(i) +
                                  " references a vertex out of range (vertex count " +
                                  std::to_string(n) + ")");
    }
  }
}

}  // namespace radsim
