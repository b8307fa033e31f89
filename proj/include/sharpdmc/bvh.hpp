#pragma once

#include "sharpdmc/mesh.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

namespace sharpdmc {

inline constexpr double kDefaultFeatureTolerance = 1e-7;

struct NearestHit {
  Vec3 point = Vec3::Zero();
  std::uint32_t triangle_id = 0;
  std::array<double, 3> barycentric{1.0, 0.0, 0.0};
  double distance = std::numeric_limits<double>::infinity();
  Feature feature;

  bool valid() const { return std::isfinite(distance); }
};

/// Median-split bounding volume hierarchy over a mesh's triangles with exact
/// nearest-point queries and welded edge/vertex adjacency.
class TriangleBVH {
 public:
  struct Node {
    Aabb box;
    std::uint32_t left = 0;   // interior: first child index (second is left + 1)
    std::uint32_t first = 0;  // leaf: offset into the ordered triangle list
    std::uint32_t count = 0;  // 0 for interior nodes
  };

  static constexpr std::uint32_t kLeafSize = 2;

  explicit TriangleBVH(std::shared_ptr<const TriangleMesh> mesh,
                       double feature_tolerance = kDefaultFeatureTolerance);
  explicit TriangleBVH(const TriangleMesh& mesh,
                       double feature_tolerance = kDefaultFeatureTolerance);

  const TriangleMesh& mesh() const { return *mesh_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  /// Triangle ids in leaf order.
  const std::vector<std::uint32_t>& leaf_order() const { return order_; }
  double feature_tolerance() const { return feature_tolerance_; }
  int depth() const;

  /// Exact nearest point; ties resolved toward the lowest triangle id.
  NearestHit nearest_point(const Vec3& p) const;

  /// Same as nearest_point, seeded with a candidate triangle (typically the
  /// previous hit of a nearby query) to tighten pruning. Result is identical.
  NearestHit nearest_point(const Vec3& p, std::uint32_t hint) const;

  /// T(Q): the triangles incident to the hit's feature on the welded mesh.
  std::vector<std::uint32_t> incident_triangles(const NearestHit& hit, double tol_feat) const;

  template <typename Fn>
  void for_each_incident(const NearestHit& hit, double tol_feat, Fn&& fn) const {
    const Feature f = classify_feature(hit.barycentric, tol_feat);
    const auto& tri = mesh_->triangles()[hit.triangle_id];
    if (f.kind == FeatureKind::Face) {
      fn(hit.triangle_id);
    } else if (f.kind == FeatureKind::Vertex) {
      const std::uint32_t v = weld_[tri[f.local_id]];
      for (std::uint32_t k = vertex_offsets_[v]; k < vertex_offsets_[v + 1]; ++k) fn(vertex_tris_[k]);
    } else {
      const std::uint64_t key = edge_key(weld_[tri[f.local_id]], weld_[tri[(f.local_id + 1) % 3]]);
      auto it = std::lower_bound(edge_tris_.begin(), edge_tris_.end(),
                                 std::pair<std::uint64_t, std::uint32_t>{key, 0});
      for (; it != edge_tris_.end() && it->first == key; ++it) fn(it->second);
    }
  }

  /// Welded vertex id of a mesh vertex (bit-identical positions share an id).
  std::uint32_t welded_id(std::uint32_t vertex) const { return weld_[vertex]; }

 private:
  static std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  void build();
  void build_adjacency();
  void visit_leaf(const Node& node, const Vec3& p, NearestHit& best, double& best_d2) const;
  void test_triangle(std::uint32_t tri, const Vec3& p, NearestHit& best, double& best_d2) const;

  std::shared_ptr<const TriangleMesh> mesh_;
  double feature_tolerance_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> weld_;
  std::vector<std::uint32_t> vertex_offsets_;
  std::vector<std::uint32_t> vertex_tris_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> edge_tris_;
};

}  // namespace sharpdmc
