#include "radsim/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace radsim {

namespace {

constexpr double kBaryEps = 1e-7;    // slop on the barycentric test, avoids edge leaks
constexpr double kDetEps = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  Vec3 lo{kInf, kInf, kInf};
  Vec3 hi{-kInf, -kInf, -kInf};

  void grow(const Vec3& p) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
  }
  void grow(const Box& b) { grow(b.lo); grow(b.hi); }

  double half_area() const {
    Vec3 d = hi - lo;
    return std::max(0.0, d.x * d.y + d.y * d.z + d.z * d.x);
  }
  int widest_axis() const {
    Vec3 d = hi - lo;
    if (d.x >= d.y && d.x >= d.z) return 0;
    return d.y >= d.z ? 1 : 2;
  }
};

inline double axis_of(const Vec3& v, int a) { return a == 0 ? v.x : (a == 1 ? v.y : v.z); }

// Moller-Trumbore, two-sided. Accepts t in (t_min, t_max].
inline bool hit_triangle(const Vec3& p0, const Vec3& e1, const Vec3& e2, const Vec3& origin,
                         const Vec3& dir, double t_min, double t_max, double& t_out) {
  Vec3 pvec = cross(dir, e2);
  double det = dot(e1, pvec);
  if (std::abs(det) < kDetEps) return false;
  double inv_det = 1.0 / det;
  Vec3 tvec = origin - p0;
  double u = dot(tvec, pvec) * inv_det;
  if (u < -kBaryEps || u > 1.0 + kBaryEps) return false;
  Vec3 qvec = cross(tvec, e1);
  double v = dot(dir, qvec) * inv_det;
  if (v < -kBaryEps || u + v > 1.0 + kBaryEps) return false;
  double t = dot(e2, qvec) * inv_det;
  if (t <= t_min || t > t_max) return false;
  t_out = t;
  return true;
}

inline bool hit_box(const Vec3& lo, const Vec3& hi, const Vec3& origin, const Vec3& dir,
                    double t_min, double t_max) {
  for (int a = 0; a < 3; ++a) {
    double o = axis_of(origin, a);
    double d = axis_of(dir, a);
    double l = axis_of(lo, a);
    double h = axis_of(hi, a);
    if (d == 0.0) {
      if (o < l || o > h) return false;
      continue;
    }
    double inv = 1.0 / d;
    double t1 = (l - o) * inv;
    double t2 = (h - o) * inv;
    if (t1 > t2) std::swap(t1, t2);
    t_min = std::max(t_min, t1);
    t_max = std::min(t_max, t2);
    if (t_min > t_max) return false;
  }
  return true;
}

struct Builder {
  static constexpr int kBins = 16;
  static constexpr int kMaxLeaf = 8;
  static constexpr int kMinLeaf = 2;
  static constexpr int kMaxDepth = 28;

  const std::vector<Box>& boxes;
  const std::vector<Vec3>& centroids;
  std::vector<uint32_t>& order;

  std::vector<AccelIndex::Node>* nodes;

  uint32_t build(uint32_t begin, uint32_t end, int depth) {
    Box bounds;
    Box cbounds;
    for (uint32_t i = begin; i < end; ++i) {
      bounds.grow(boxes[order[i]]);
      cbounds.grow(centroids[order[i]]);
    }
    uint32_t node_id = uint32_t(nodes->size());
    nodes->push_back({});
    // Pad so rays spawned exactly on a face never slip between nodes.
    Vec3 pad{1e-9, 1e-9, 1e-9};
    (*nodes)[node_id].lo = bounds.lo - pad;
    (*nodes)[node_id].hi = bounds.hi + pad;

    uint32_t count = end - begin;
    if (count <= kMinLeaf) return make_leaf(node_id, begin, count);

    int axis = cbounds.widest_axis();
    double cmin = axis_of(cbounds.lo, axis);
    double cmax = axis_of(cbounds.hi, axis);
    uint32_t mid = begin + count / 2;
    bool split_found = false;

    // Past kMaxDepth only balanced median splits, keeping the tree within the
    // traversal stack.
    if (depth < kMaxDepth && cmax - cmin > 1e-12) {
      // Binned SAH over the widest centroid axis.
      struct Bin { Box box; uint32_t n = 0; };
      Bin bins[kBins];
      double scale = kBins / (cmax - cmin);
      auto bin_of = [&](uint32_t tri) {
        int b = int((axis_of(centroids[tri], axis) - cmin) * scale);
        return std::clamp(b, 0, kBins - 1);
      };
      for (uint32_t i = begin; i < end; ++i) {
        int b = bin_of(order[i]);
        bins[b].box.grow(boxes[order[i]]);
        bins[b].n++;
      }
      double best_cost = kInf;
      int best_split = -1;
      for (int s = 1; s < kBins; ++s) {
        Box left, right;
        uint32_t nl = 0, nr = 0;
        for (int b = 0; b < s; ++b) { if (bins[b].n) { left.grow(bins[b].box); nl += bins[b].n; } }
        for (int b = s; b < kBins; ++b) { if (bins[b].n) { right.grow(bins[b].box); nr += bins[b].n; } }
        if (nl == 0 || nr == 0) continue;
        double cost = left.half_area() * nl + right.half_area() * nr;
        if (cost < best_cost) { best_cost = cost; best_split = s; }
      }
      double leaf_cost = bounds.half_area() * count;
      if (best_split >= 0 && (best_cost < leaf_cost || count > kMaxLeaf)) {
        auto it = std::partition(order.begin() + begin, order.begin() + end,
                                 [&](uint32_t tri) { return bin_of(tri) < best_split; });
        mid = uint32_t(it - order.begin());
        split_found = (mid != begin && mid != end);
      }
    }

    if (!split_found) {
      if (count <= kMaxLeaf) return make_leaf(node_id, begin, count);
      // Median fallback: identical centroids or SAH preferred a leaf we can't have.
      std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                       [&](uint32_t a, uint32_t b) {
                         return axis_of(centroids[a], axis) < axis_of(centroids[b], axis);
                       });
    }

    build(begin, mid, depth + 1);  // left child lands at node_id + 1
    uint32_t right = build(mid, end, depth + 1);
    (*nodes)[node_id].first = right;
    (*nodes)[node_id].count = 0;
    (*nodes)[node_id].axis = uint8_t(axis);
    return node_id;
  }

  uint32_t make_leaf(uint32_t node_id, uint32_t begin, uint32_t count) {
    (*nodes)[node_id].first = begin;
    (*nodes)[node_id].count = uint16_t(count);
    return node_id;
  }
};

}  // namespace

AccelIndex::AccelIndex(const TriangleMesh& mesh) {
  validate_mesh(mesh);

  std::vector<Box> boxes;
  std::vector<Vec3> centroids;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Triangle& tri = mesh.triangles[i];
    if (triangle_area(mesh, tri) <= 0.0) continue;  // degenerate, cannot be hit
    const Vec3& a = mesh.vertices[tri.v0];
    const Vec3& b = mesh.vertices[tri.v1];
    const Vec3& c = mesh.vertices[tri.v2];
    Box box;
    box.grow(a); box.grow(b); box.grow(c);
    boxes.push_back(box);
    centroids.push_back((a + b + c) / 3.0);
    tris_.push_back({a, b - a, c - a, tri.material_id, int(i)});
  }
  if (tris_.empty()) {
    throw std::invalid_argument("AccelIndex: mesh has no non-degenerate triangle");
  }

  std::vector<uint32_t> order(tris_.size());
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(2 * tris_.size());
  Builder builder{boxes, centroids, order, &nodes_};
  builder.build(0, uint32_t(tris_.size()), 0);

  std::vector<PackedTri> reordered(tris_.size());
  for (std::size_t i = 0; i < order.size(); ++i) reordered[i] = tris_[order[i]];
  tris_ = std::move(reordered);
}

std::size_t AccelIndex::leaf_count() const {
  std::size_t n = 0;
  for (const Node& node : nodes_)
    if (node.count > 0) ++n;
  return n;
}

std::optional<RayHit> AccelIndex::intersect(const Vec3& origin, const Vec3& dir, double t_min,
                                            double t_max) const {
  double best_t = t_max;
  int best = -1;

  uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.lo, node.hi, origin, dir, t_min, best_t)) continue;
    if (node.count > 0) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        double t;
        if (hit_triangle(tris_[i].p0, tris_[i].e1, tris_[i].e2, origin, dir, t_min, best_t, t)) {
          if (best < 0 || t < best_t ||
              (t == best_t && tris_[i].triangle_id < tris_[best].triangle_id)) {
            best_t = t;
            best = int(i);
          }
        }
      }
    } else {
      // Near child first so the far side can be culled by best_t.
      uint32_t node_id = uint32_t(&node - nodes_.data());
      uint32_t near = node_id + 1, far = node.first;
      if (axis_of(dir, node.axis) < 0.0) std::swap(near, far);
      stack[top++] = far;
      stack[top++] = near;
    }
  }

  if (best < 0) return std::nullopt;
  const PackedTri& tri = tris_[best];
  RayHit hit;
  hit.t = best_t;
  hit.point = origin + best_t * dir;
  Vec3 n = normalized(cross(tri.e1, tri.e2));
  if (dot(n, dir) > 0.0) n = -n;  // two-sided
  hit.normal = n;
  hit.triangle_id = tri.triangle_id;
  hit.material_id = tri.material_id;
  return hit;
}

bool AccelIndex::occluded(const Vec3& a, const Vec3& b) const {
  Vec3 delta = b - a;
  double len = norm(delta);
  if (len <= 0.0) throw std::invalid_argument("occluded: endpoints coincide");
  constexpr double kEndEps = 1e-4;
  if (len <= 2.0 * kEndEps) return false;
  Vec3 dir = delta / len;

  uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  double t_min = kEndEps, t_max = len - kEndEps;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.lo, node.hi, a, dir, t_min, t_max)) continue;
    if (node.count > 0) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        double t;
        if (hit_triangle(tris_[i].p0, tris_[i].e1, tris_[i].e2, a, dir, t_min, t_max, t)) {
          return true;
        }
      }
    } else {
      uint32_t node_id = uint32_t(&node - nodes_.data());
      stack[top++] = node.first;
      stack[top++] = node_id + 1;
    }
  }
  return false;
}

}  // namespace radsim
