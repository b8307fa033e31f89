#include "sharpdmc/mesh.hpp"

#include "sharpdmc/error.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>

namespace sharpdmc {

namespace {

struct PositionKey {
  std::uint64_t bits[3];
  friend bool operator==(const PositionKey&, const PositionKey&) = default;
};

struct PositionKeyHash {
  std::size_t operator()(const PositionKey& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto b : k.bits) h = (h ^ b) * 0x100000001b3ull + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

PositionKey key_of(const Vec3& p) {
  PositionKey k;
  for (int a = 0; a < 3; ++a) {
    double v = p[a] == 0.0 ? 0.0 : p[a];  // fold -0 into +0
    std::memcpy(&k.bits[a], &v, sizeof v);
  }
  return k;
}

/// Vertex ids after merging bit-identical positions.
std::vector<std::uint32_t> exact_weld_ids(const TriangleMesh& mesh) {
  std::unordered_map<PositionKey, std::uint32_t, PositionKeyHash> ids;
  ids.reserve(mesh.vertex_count());
  std::vector<std::uint32_t> out(mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    auto [it, inserted] =
        ids.try_emplace(key_of(mesh.positions()[i]), static_cast<std::uint32_t>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct EdgeUse {
  int count = 0;
  int direction_sum = 0;  // +1 for min->max traversal, -1 otherwise
  std::uint32_t faces[2] = {0, 0};
  std::uint32_t a = 0, b = 0;
};

std::unordered_map<std::uint64_t, EdgeUse> collect_edges(const TriangleMesh& mesh,
                                                         const std::vector<std::uint32_t>& ids) {
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(mesh.triangle_count() * 2);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int e = 0; e < 3; ++e) {
      std::uint32_t a = ids[tri[e]];
      std::uint32_t b = ids[tri[(e + 1) % 3]];
      if (a == b) continue;
      EdgeUse& use = edges[edge_key(a, b)];
      if (use.count < 2) use.faces[use.count] = static_cast<std::uint32_t>(t);
      use.count += 1;
      use.direction_sum += a < b ? 1 : -1;
      use.a = std::min(tri[e], tri[(e + 1) % 3]);
      use.b = std::max(tri[e], tri[(e + 1) % 3]);
    }
  }
  return edges;
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles,
                           Provenance provenance)
    : positions_(std::move(positions)),
      triangles_(std::move(triangles)),
      provenance_(std::move(provenance)) {
  for (const auto& tri : triangles_) {
    for (auto v : tri) {
      if (v >= positions_.size()) {
        throw Error(Errc::ParseError, "triangle index " + std::to_string(v) + " out of range");
      }
    }
  }
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& p : positions_) box.expand(p);
  return box;
}

double TriangleMesh::triangle_area(std::size_t tri) const {
  return sharpdmc::triangle_area(corner(tri, 0), corner(tri, 1), corner(tri, 2));
}

Vec3 TriangleMesh::face_normal(std::size_t tri) const {
  Vec3 n = (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0));
  double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

std::vector<Vec3> TriangleMesh::vertex_normals() const {
  std::vector<Vec3> normals(positions_.size(), Vec3::Zero());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    // Unnormalized cross product is area-weighted already.
    Vec3 n = (corner(t, 1) - corner(t, 0)).cross(corner(t, 2) - corner(t, 0));
    for (auto v : triangles_[t]) normals[v] += n;
  }
  for (auto& n : normals) {
    double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

double TriangleMesh::surface_area() const {
  double total = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) total += triangle_area(t);
  return total;
}

TriangleMesh TriangleMesh::transformed(const NormalizationTransform& t) const {
  std::vector<Vec3> moved;
  moved.reserve(positions_.size());
  for (const auto& p : positions_) moved.push_back(t.apply(p));
  Provenance prov = provenance_;
  prov.transform = t.compose(provenance_.transform);
  return TriangleMesh(std::move(moved), triangles_, std::move(prov));
}

TriangleMesh weld_vertices(const TriangleMesh& mesh, double tol) {
  const auto& pos = mesh.positions();
  std::vector<std::uint32_t> remap(pos.size());
  std::vector<Vec3> kept;
  kept.reserve(pos.size());

  if (tol <= 0.0) {
    std::unordered_map<PositionKey, std::uint32_t, PositionKeyHash> ids;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      auto [it, inserted] = ids.try_emplace(key_of(pos[i]), static_cast<std::uint32_t>(kept.size()));
      if (inserted) kept.push_back(pos[i]);
      remap[i] = it->second;
    }
  } else {
    // Hash grid with cell size tol; a match can only live in the 27 neighbors.
    struct CellHash {
      std::size_t operator()(const std::array<std::int64_t, 3>& c) const noexcept {
        return static_cast<std::size_t>(c[0] * 73856093ll ^ c[1] * 19349663ll ^ c[2] * 83492791ll);
      }
    };
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, CellHash> grid;
    const double tol2 = tol * tol;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      std::array<std::int64_t, 3> cell;
      for (int a = 0; a < 3; ++a) cell[a] = static_cast<std::int64_t>(std::floor(pos[i][a] / tol));
      std::int64_t match = -1;
      for (int dz = -1; dz <= 1 && match < 0; ++dz) {
        for (int dy = -1; dy <= 1 && match < 0; ++dy) {
          for (int dx = -1; dx <= 1 && match < 0; ++dx) {
            auto it = grid.find({cell[0] + dx, cell[1] + dy, cell[2] + dz});
            if (it == grid.end()) continue;
            for (auto id : it->second) {
              if ((kept[id] - pos[i]).squaredNorm() <= tol2) {
                if (match < 0 || id < match) match = id;
              }
            }
          }
        }
      }
      if (match < 0) {
        match = static_cast<std::int64_t>(kept.size());
        kept.push_back(pos[i]);
        grid[cell].push_back(static_cast<std::uint32_t>(match));
      }
      remap[i] = static_cast<std::uint32_t>(match);
    }
  }

  std::vector<Triangle> tris;
  tris.reserve(mesh.triangle_count());
  for (const auto& t : mesh.triangles()) {
    Triangle w{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (w[0] == w[1] || w[1] == w[2] || w[0] == w[2]) continue;
    tris.push_back(w);
  }
  return TriangleMesh(std::move(kept), std::move(tris), mesh.provenance());
}

TriangleMesh drop_degenerate(const TriangleMesh& mesh, double area_tol) {
  std::vector<Triangle> tris;
  tris.reserve(mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    if (mesh.triangle_area(t) <= area_tol) continue;
    tris.push_back(tri);
  }
  return TriangleMesh(mesh.positions(), std::move(tris), mesh.provenance());
}

std::pair<TriangleMesh, NormalizationTransform> normalize_to_unit_cube(const TriangleMesh& mesh,
                                                                      double padding) {
  if (mesh.vertex_count() == 0) throw Error(Errc::EmptyMesh, "cannot normalize an empty mesh");
  if (!(padding >= 0.0 && padding < 0.5)) {
    throw Error(Errc::InvalidConfig, "padding must lie in [0, 0.5)");
  }
  Aabb box;
  for (const auto& t : mesh.triangles()) {
    for (auto v : t) box.expand(mesh.positions()[v]);
  }
  if (box.empty()) box = mesh.bounds();
  const double longest = box.extent().maxCoeff();
  if (!(longest > 0.0)) throw Error(Errc::DegenerateBounds, "bounding box has zero extent");

  NormalizationTransform t;
  t.scale = 2.0 * (1.0 - padding) / longest;
  t.translation = -t.scale * box.center();
  return {mesh.transformed(t), t};
}

TopologyReport check_watertight_manifold(const TriangleMesh& mesh) {
  TopologyReport report;
  const auto ids = exact_weld_ids(mesh);
  const auto edges = collect_edges(mesh, ids);

  report.edge_manifold = true;
  report.closed = true;
  report.oriented = true;
  for (const auto& [key, use] : edges) {
    if (use.count > 2) {
      report.edge_manifold = false;
      report.closed = false;
      ++report.nonmanifold_edges;
    } else if (use.count == 1) {
      report.closed = false;
      ++report.boundary_edges;
    } else if (use.direction_sum != 0) {
      report.oriented = false;
    }
  }
  if (mesh.empty()) report.closed = false;

  std::vector<char> used(mesh.vertex_count() ? *std::max_element(ids.begin(), ids.end()) + 1 : 0, 0);
  long long faces = 0;
  for (const auto& t : mesh.triangles()) {
    if (ids[t[0]] == ids[t[1]] || ids[t[1]] == ids[t[2]] || ids[t[0]] == ids[t[2]]) continue;
    ++faces;
    for (auto v : t) used[ids[v]] = 1;
  }
  long long verts = std::count(used.begin(), used.end(), 1);
  report.euler_characteristic = verts - static_cast<long long>(edges.size()) + faces;
  return report;
}

std::size_t connected_components(const TriangleMesh& mesh) {
  const auto ids = exact_weld_ids(mesh);
  std::vector<std::uint32_t> parent(mesh.triangle_count());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<std::uint64_t, std::uint32_t> first_face;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int e = 0; e < 3; ++e) {
      auto key = edge_key(ids[tri[e]], ids[tri[(e + 1) % 3]]);
      auto [it, inserted] = first_face.try_emplace(key, static_cast<std::uint32_t>(t));
      if (!inserted) parent[find(static_cast<std::uint32_t>(t))] = find(it->second);
    }
  }
  std::size_t count = 0;
  for (std::uint32_t t = 0; t < parent.size(); ++t) count += find(t) == t;
  return count;
}

std::vector<InteriorEdge> interior_edges(const TriangleMesh& mesh) {
  const auto ids = exact_weld_ids(mesh);
  const auto edges = collect_edges(mesh, ids);

  // Deterministic order: sort by edge key.
  std::vector<std::uint64_t> keys;
  keys.reserve(edges.size());
  for (const auto& kv : edges) {
    if (kv.second.count > 2) throw Error(Errc::NonManifoldInput, "edge shared by more than two triangles");
    if (kv.second.count == 2) keys.push_back(kv.first);
  }
  std::sort(keys.begin(), keys.end());

  std::vector<InteriorEdge> out;
  out.reserve(keys.size());
  for (auto key : keys) {
    const EdgeUse& use = edges.at(key);
    const Vec3 n0 = mesh.face_normal(use.faces[0]);
    const Vec3 n1 = mesh.face_normal(use.faces[1]);
    const double c = std::clamp(n0.dot(n1), -1.0, 1.0);
    out.push_back({use.a, use.b, {use.faces[0], use.faces[1]}, std::acos(c) * 180.0 / M_PI});
  }
  return out;
}

std::vector<DihedralEdge> dihedral_angles(const TriangleMesh& mesh) {
  const auto report = check_watertight_manifold(mesh);
  if (!report.edge_manifold || !report.closed) {
    throw Error(Errc::NonManifoldInput, "dihedral angles need a closed edge-manifold mesh");
  }
  std::vector<DihedralEdge> out;
  for (const auto& e : interior_edges(mesh)) {
    out.push_back({180.0 - e.deviation_deg, (mesh.positions()[e.a] - mesh.positions()[e.b]).norm()});
  }
  return out;
}

double DihedralHistogram::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double DihedralHistogram::mass_between(double lo_deg, double hi_deg) const {
  double mass = 0.0;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    double center = (static_cast<double>(b) + 0.5) * bin_width_deg;
    if (center >= lo_deg && center <= hi_deg) mass += weights[b];
  }
  return mass;
}

DihedralHistogram dihedral_histogram(const TriangleMesh& mesh, int bins) {
  if (bins <= 0) throw Error(Errc::InvalidConfig, "bin count must be positive");
  DihedralHistogram hist;
  hist.weights.assign(static_cast<std::size_t>(bins), 0.0);
  hist.bin_width_deg = 180.0 / bins;
  for (const auto& e : dihedral_angles(mesh)) {
    int b = static_cast<int>(e.angle_deg / hist.bin_width_deg);
    b = std::clamp(b, 0, bins - 1);
    hist.weights[static_cast<std::size_t>(b)] += e.length;
  }
  return hist;
}

double crease_fraction_near(const TriangleMesh& mesh, double target_deg, double tolerance_deg,
                            double sharp_max_deg) {
  double sharp = 0.0;
  double near = 0.0;
  for (const auto& e : dihedral_angles(mesh)) {
    if (e.angle_deg > sharp_max_deg) continue;
    sharp += e.length;
    if (std::abs(e.angle_deg - target_deg) <= tolerance_deg) near += e.length;
  }
  return sharp > 0.0 ? near / sharp : 0.0;
}

bool ray_parity_inside(const TriangleMesh& mesh, const Vec3& p) {
  // Skewed direction so axis-aligned fixtures never graze edges exactly.
  const Vec3 dir = Vec3(0.5773502691896258, 0.5345224838248488, 0.6172133998483676).normalized();
  int hits = 0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3& a = mesh.corner(t, 0);
    const Vec3 e1 = mesh.corner(t, 1) - a;
    const Vec3 e2 = mesh.corner(t, 2) - a;
    const Vec3 pv = dir.cross(e2);
    const double det = e1.dot(pv);
    if (std::abs(det) < 1e-300) continue;
    const double inv = 1.0 / det;
    const Vec3 tv = p - a;
    const double u = tv.dot(pv) * inv;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 qv = tv.cross(e1);
    const double v = dir.dot(qv) * inv;
    if (v < 0.0 || u + v > 1.0) continue;
    if (e2.dot(qv) * inv > 0.0) ++hits;
  }
  return (hits % 2) == 1;
}

}  // namespace sharpdmc
