#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "radsim/geometry.hpp"

namespace radsim {

// Static BVH over a triangle mesh (binned SAH, median-split fallback).
// Immutable after construction; intersect/occluded are safe to call from many
// threads at once. Triangles are two-sided: hit normals always face the ray.
class AccelIndex {
 public:
  // Throws std::invalid_argument if the mesh has no non-degenerate triangle.
  explicit AccelIndex(const TriangleMesh& mesh);

  // Nearest hit with t in (t_min, t_max], or nullopt. Ties on t go to the
  // lower triangle id.
  std::optional<RayHit> intersect(const Vec3& origin, const Vec3& dir, double t_min,
                                  double t_max) const;

  // True iff any triangle cuts the open segment (a, b), shrunk by 1e-4 m at
  // both endpoints.
  bool occluded(const Vec3& a, const Vec3& b) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const;

  struct Node {
    Vec3 lo, hi;
    uint32_t first = 0;  // inner: right child index (left is self+1); leaf: first triangle
    uint16_t count = 0;  // 0 = inner node
    uint8_t axis = 0;
  };

 private:
  struct PackedTri {
    Vec3 p0, e1, e2;
    int material_id = 0;
    int triangle_id = 0;
  };

  std::vector<Node> nodes_;
  std::vector<PackedTri> tris_;
};

}  // namespace radsim
