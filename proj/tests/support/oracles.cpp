#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace oracle {

namespace {

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  return (p - closest_on_segment(p, a, b)).norm();
}

using Key = std::tuple<double, double, double>;
Key key_of(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

Vec3 closest_point(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  if (n2 > 0.0) {
    const Vec3 q = p - n * (n.dot(p - a) / n2);
    const bool inside = n.dot((b - a).cross(q - a)) >= 0.0 && n.dot((c - b).cross(q - b)) >= 0.0 &&
                        n.dot((a - c).cross(q - c)) >= 0.0;
    if (inside) return q;
  }
  Vec3 best = closest_on_segment(p, a, b);
  for (const Vec3& cand : {closest_on_segment(p, b, c), closest_on_segment(p, c, a)}) {
    if ((p - cand).squaredNorm() < (p - best).squaredNorm()) best = cand;
  }
  return best;
}

Nearest nearest(const TriangleMesh& mesh, const Vec3& p) {
  Nearest best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 q = closest_point(p, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
    const double d = (p - q).norm();
    if (d < best.distance) best = {t, q, d};
  }
  return best;
}

double linf_distance(const TriangleMesh& mesh, const Vec3& p, double feature_tol) {
  const Nearest hit = nearest(mesh, p);
  const Vec3 v[3] = {mesh.corner(hit.triangle, 0), mesh.corner(hit.triangle, 1), mesh.corner(hit.triangle, 2)};

  std::vector<Vec3> feature;
  for (const Vec3& x : v) {
    if ((hit.point - x).norm() <= feature_tol) feature = {x};
  }
  if (feature.empty()) {
    for (int e = 0; e < 3; ++e) {
      if (segment_distance(hit.point, v[e], v[(e + 1) % 3]) <= feature_tol) feature = {v[e], v[(e + 1) % 3]};
    }
  }

  auto plane_distance = [&](std::size_t t) {
    const Vec3 n = (mesh.corner(t, 1) - mesh.corner(t, 0)).cross(mesh.corner(t, 2) - mesh.corner(t, 0));
    if (n.norm() == 0.0) return 0.0;
    return std::abs(n.normalized().dot(p - mesh.corner(t, 0)));
  };
  if (feature.empty()) return plane_distance(hit.triangle);

  double result = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    bool incident = true;
    for (const Vec3& f : feature) {
      incident = incident && (mesh.corner(t, 0) == f || mesh.corner(t, 1) == f || mesh.corner(t, 2) == f);
    }
    if (incident) result = std::max(result, plane_distance(t));
  }
  return result;
}

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
  std::vector<Vec3> poly = {a, b, c};
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = -1; side <= 1; side += 2) {
      const double bound = center[axis] + side * half[axis];
      // Inside means on the box side of the slab plane.
      auto inside = [&](const Vec3& x) { return side < 0 ? x[axis] >= bound : x[axis] <= bound; };
      std::vector<Vec3> next;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % poly.size()];
        if (inside(cur)) next.push_back(cur);
        if (inside(cur) != inside(nxt)) {
          const double t = (bound - cur[axis]) / (nxt[axis] - cur[axis]);
          Vec3 x = cur + t * (nxt - cur);
          x[axis] = bound;
          next.push_back(x);
        }
      }
      poly = std::move(next);
      if (poly.empty()) return false;
    }
  }
  return true;
}

double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 a = mesh.corner(t, 0) - p, b = mesh.corner(t, 1) - p, c = mesh.corner(t, 2) - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * M_PI);
}

Topology topology(const TriangleMesh& mesh) {
  std::map<Key, std::size_t> ids;
  auto id_of = [&](const Vec3& v) { return ids.emplace(key_of(v), ids.size()).first->second; };

  // Undirected edge -> (triangle, forward?) occurrences.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, bool>>> edges;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    std::size_t v[3];
    for (int k = 0; k < 3; ++k) v[k] = id_of(mesh.corner(t, k));
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = v[k], b = v[(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back({t, a < b});
    }
  }

  Topology out;
  out.edge_manifold = out.closed = out.oriented = true;
  std::vector<std::size_t> parent(mesh.triangle_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [edge, uses] : edges) {
    if (uses.size() > 2) out.edge_manifold = false;
    if (uses.size() != 2) out.closed = false;
    if (uses.size() == 2 && uses[0].second == uses[1].second) out.oriented = false;
    for (std::size_t i = 1; i < uses.size(); ++i) parent[find(uses[i].first)] = find(uses[0].first);
  }
  if (!out.edge_manifold) out.oriented = false;
  out.euler = static_cast<long long>(ids.size()) - static_cast<long long>(edges.size()) +
              static_cast<long long>(mesh.triangle_count());
  for (std::size_t t = 0; t < parent.size(); ++t) out.components += find(t) == t;
  return out;
}

int patch_count(std::uint8_t occupancy) {
  if (occupancy == 0 || occupancy == 0xFF) return 0;
  int parent[8];
  std::iota(parent, parent + 8, 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  auto occ = [&](int c) { return (occupancy >> c) & 1; };
  for (int a = 0; a < 8; ++a) {
    for (int bit = 1; bit < 8; bit <<= 1) {
      const int b = a | bit;
      if (b != a && occ(a) == occ(b)) parent[find(a)] = find(b);
    }
  }
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      int c[4], n = 0;
      for (int corner = 0; corner < 8; ++corner) {
        if (((corner >> axis) & 1) == side) c[n++] = corner;
      }
      if (occ(c[0]) == occ(c[3]) && occ(c[1]) == occ(c[2]) && occ(c[0]) != occ(c[1])) {
        parent[find(c[1])] = find(c[2]);
      }
    }
  }
  int regions = 0;
  for (int c = 0; c < 8; ++c) regions += find(c) == c;
  return regions - 1;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::uint8_t byte : bytes) {
    crc ^= byte;
    for (int i = 0; i < 8; ++i) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

}  // namespace oracle
