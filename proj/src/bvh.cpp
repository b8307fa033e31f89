#include "sharpdmc/bvh.hpp"

#include "sharpdmc/error.hpp"

#include <cstring>
#include <numeric>
#include <unordered_map>

namespace sharpdmc {

namespace {

struct BitsHash {
  std::size_t operator()(const std::array<std::uint64_t, 3>& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto b : k) h = (h ^ b) * 1099511628211ull;
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

}  // namespace

TriangleBVH::TriangleBVH(const TriangleMesh& mesh, double feature_tolerance)
    : TriangleBVH(std::make_shared<const TriangleMesh>(mesh), feature_tolerance) {}

TriangleBVH::TriangleBVH(std::shared_ptr<const TriangleMesh> mesh, double feature_tolerance)
    : mesh_(std::move(mesh)), feature_tolerance_(feature_tolerance) {
  if (!mesh_ || mesh_->empty()) throw Error(Errc::EmptyMesh, "cannot build a BVH without triangles");
  build();
  build_adjacency();
}

void TriangleBVH::build() {
  const auto& mesh = *mesh_;
  const std::size_t n = mesh.triangle_count();
  std::vector<Aabb> tri_box(n);
  std::vector<Vec3> centroid(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (int k = 0; k < 3; ++k) tri_box[t].expand(mesh.corner(t, k));
    centroid[t] = (mesh.corner(t, 0) + mesh.corner(t, 1) + mesh.corner(t, 2)) / 3.0;
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);

  struct Task {
    std::uint32_t node, first, count;
  };
  nodes_.reserve(2 * n);
  nodes_.push_back({});
  std::vector<Task> stack{{0, 0, static_cast<std::uint32_t>(n)}};
  while (!stack.empty()) {
    Task task = stack.back();
    stack.pop_back();
    Aabb box;
    for (std::uint32_t k = task.first; k < task.first + task.count; ++k) box.expand(tri_box[order_[k]]);
    nodes_[task.node].box = box;
    if (task.count <= kLeafSize) {
      nodes_[task.node].first = task.first;
      nodes_[task.node].count = task.count;
      continue;
    }
    const int axis = box.longest_axis();
    auto begin = order_.begin() + task.first;
    auto end = begin + task.count;
    std::sort(begin, end, [&](std::uint32_t a, std::uint32_t b) {
      if (centroid[a][axis] != centroid[b][axis]) return centroid[a][axis] < centroid[b][axis];
      return a < b;
    });
    const std::uint32_t half = task.count / 2;
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[task.node].left = left;
    nodes_[task.node].count = 0;
    stack.push_back({left + 1, task.first + half, task.count - half});
    stack.push_back({left, task.first, half});
  }
}

void TriangleBVH::build_adjacency() {
  const auto& mesh = *mesh_;
  std::unordered_map<std::array<std::uint64_t, 3>, std::uint32_t, BitsHash> ids;
  weld_.resize(mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    std::array<std::uint64_t, 3> bits;
    for (int a = 0; a < 3; ++a) {
      double x = mesh.positions()[v][a] == 0.0 ? 0.0 : mesh.positions()[v][a];
      std::memcpy(&bits[a], &x, 8);
    }
    weld_[v] = ids.try_emplace(bits, static_cast<std::uint32_t>(ids.size())).first->second;
  }
  const std::size_t welded = ids.size();

  std::vector<std::vector<std::uint32_t>> rings(welded);
  for (std::uint32_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int k = 0; k < 3; ++k) {
      auto& ring = rings[weld_[tri[k]]];
      if (ring.empty() || ring.back() != t) ring.push_back(t);
      edge_tris_.push_back({edge_key(weld_[tri[k]], weld_[tri[(k + 1) % 3]]), t});
    }
  }
  vertex_offsets_.assign(welded + 1, 0);
  for (std::size_t v = 0; v < welded; ++v) {
    vertex_offsets_[v + 1] = vertex_offsets_[v] + static_cast<std::uint32_t>(rings[v].size());
  }
  vertex_tris_.reserve(vertex_offsets_.back());
  for (const auto& ring : rings) vertex_tris_.insert(vertex_tris_.end(), ring.begin(), ring.end());
  std::sort(edge_tris_.begin(), edge_tris_.end());
  edge_tris_.erase(std::unique(edge_tris_.begin(), edge_tris_.end()), edge_tris_.end());
}

int TriangleBVH::depth() const {
  std::vector<std::pair<std::uint32_t, int>> stack{{0, 1}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [node, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[node].count == 0) {
      stack.push_back({nodes_[node].left, d + 1});
      stack.push_back({nodes_[node].left + 1, d + 1});
    }
  }
  return deepest;
}

void TriangleBVH::test_triangle(std::uint32_t tri, const Vec3& p, NearestHit& best,
                                double& best_d2) const {
  const auto& mesh = *mesh_;
  TriangleClosest c = closest_on_triangle(p, mesh.corner(tri, 0), mesh.corner(tri, 1), mesh.corner(tri, 2));
  if (c.sq_distance < best_d2 || (c.sq_distance == best_d2 && tri < best.triangle_id)) {
    best_d2 = c.sq_distance;
    best.point = c.point;
    best.triangle_id = tri;
    best.barycentric = c.barycentric;
  }
}

void TriangleBVH::visit_leaf(const Node& node, const Vec3& p, NearestHit& best, double& best_d2) const {
  for (std::uint32_t k = node.first; k < node.first + node.count; ++k) test_triangle(order_[k], p, best, best_d2);
}

NearestHit TriangleBVH::nearest_point(const Vec3& p) const {
  return nearest_point(p, std::numeric_limits<std::uint32_t>::max());
}

NearestHit TriangleBVH::nearest_point(const Vec3& p, std::uint32_t hint) const {
  NearestHit best;
  best.triangle_id = std::numeric_limits<std::uint32_t>::max();
  double best_d2 = std::numeric_limits<double>::infinity();
  if (hint < mesh_->triangle_count()) test_triangle(hint, p, best, best_d2);

  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    // Ties must still be visited so the lowest id wins.
    if (node.box.sq_distance(p) > best_d2) continue;
    if (node.count > 0) {
      visit_leaf(node, p, best, best_d2);
      continue;
    }
    const std::uint32_t a = node.left;
    const std::uint32_t b = node.left + 1;
    const double da = nodes_[a].box.sq_distance(p);
    const double db = nodes_[b].box.sq_distance(p);
    // Push the farther child first so the nearer one is popped next.
    if (da <= db) {
      if (db <= best_d2) stack[top++] = b;
      if (da <= best_d2) stack[top++] = a;
    } else {
      if (da <= best_d2) stack[top++] = a;
      if (db <= best_d2) stack[top++] = b;
    }
  }
  best.distance = std::sqrt(best_d2);
  best.feature = classify_feature(best.barycentric, feature_tolerance_);
  return best;
}

std::vector<std::uint32_t> TriangleBVH::incident_triangles(const NearestHit& hit, double tol_feat) const {
  std::vector<std::uint32_t> out;
  for_each_incident(hit, tol_feat, [&](std::uint32_t t) { out.push_back(t); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace sharpdmc
