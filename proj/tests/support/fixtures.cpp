#include "fixtures.hpp"

#include "sharpdmc/error.hpp"

#include <cmath>
#include <map>
#include <random>

namespace fixtures {

using sharpdmc::Triangle;

namespace {

struct Builder {
  std::vector<Vec3> v;
  std::vector<Triangle> t;

  std::uint32_t add(const Vec3& p) {
    v.push_back(p);
    return static_cast<std::uint32_t>(v.size() - 1);
  }
  void tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) { t.push_back({a, b, c}); }
  void quad(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    tri(a, b, c);
    tri(a, c, d);
  }
  TriangleMesh build() { return TriangleMesh(std::move(v), std::move(t)); }
};

/// Orients every face of a convex polyhedron away from its vertex centroid.
TriangleMesh orient_convex(std::vector<Vec3> v, std::vector<Triangle> t) {
  Vec3 center = Vec3::Zero();
  for (const auto& p : v) center += p;
  center /= static_cast<double>(v.size());
  for (auto& tri : t) {
    const Vec3 n = (v[tri[1]] - v[tri[0]]).cross(v[tri[2]] - v[tri[0]]);
    if (n.dot(v[tri[0]] - center) < 0.0) std::swap(tri[1], tri[2]);
  }
  return TriangleMesh(std::move(v), std::move(t));
}

double cross2(std::pair<double, double> o, std::pair<double, double> a, std::pair<double, double> b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

bool in_triangle2(std::pair<double, double> p, std::pair<double, double> a, std::pair<double, double> b,
                  std::pair<double, double> c) {
  return cross2(a, b, p) >= 0.0 && cross2(b, c, p) >= 0.0 && cross2(c, a, p) >= 0.0;
}

/// Ear clipping of a simple CCW polygon; returns index triples.
std::vector<std::array<int, 3>> triangulate(const std::vector<std::pair<double, double>>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> out;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size() && !clipped; ++i) {
      const int a = idx[(i + idx.size() - 1) % idx.size()], b = idx[i], c = idx[(i + 1) % idx.size()];
      if (cross2(poly[a], poly[b], poly[c]) <= 0.0) continue;
      bool blocked = false;
      for (int q : idx) {
        if (q == a || q == b || q == c) continue;
        if (in_triangle2(poly[q], poly[a], poly[b], poly[c])) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      out.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (!clipped) throw std::runtime_error("polygon is not simple");
  }
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

/// Six grid faces of the [-1, 1] cube, each vertex passed through `map`.
template <typename Map>
TriangleMesh cube_grid(const std::vector<double>& coords, Map&& map) {
  Builder b;
  const int n = static_cast<int>(coords.size());
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = -1; sign <= 1; sign += 2) {
      const int bx = (axis + 1) % 3, cx = (axis + 2) % 3;
      const auto base = static_cast<std::uint32_t>(b.v.size());
      for (int iv = 0; iv < n; ++iv) {
        for (int iu = 0; iu < n; ++iu) {
          Vec3 p;
          p[axis] = sign;
          p[bx] = coords[static_cast<std::size_t>(iu)];
          p[cx] = coords[static_cast<std::size_t>(iv)];
          b.add(map(p));
        }
      }
      auto at = [&](int iu, int iv) { return base + static_cast<std::uint32_t>(iv * n + iu); };
      for (int iv = 0; iv + 1 < n; ++iv) {
        for (int iu = 0; iu + 1 < n; ++iu) {
          if (sign > 0) b.quad(at(iu, iv), at(iu + 1, iv), at(iu + 1, iv + 1), at(iu, iv + 1));
          else b.quad(at(iu, iv), at(iu, iv + 1), at(iu + 1, iv + 1), at(iu + 1, iv));
        }
      }
    }
  }
  return sharpdmc::weld_vertices(b.build(), 1e-12);
}

}  // namespace

TriangleMesh merge(const std::vector<TriangleMesh>& parts) {
  std::vector<Vec3> v;
  std::vector<Triangle> t;
  for (const auto& m : parts) {
    const auto base = static_cast<std::uint32_t>(v.size());
    v.insert(v.end(), m.positions().begin(), m.positions().end());
    for (auto tri : m.triangles()) t.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
  }
  return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh flipped(const TriangleMesh& mesh) {
  std::vector<Triangle> t = mesh.triangles();
  for (auto& tri : t) std::swap(tri[1], tri[2]);
  return TriangleMesh(mesh.positions(), std::move(t));
}

TriangleMesh box(const Vec3& lo, const Vec3& hi) {
  Builder b;
  for (int c = 0; c < 8; ++c) b.add({(c & 1) ? hi.x() : lo.x(), (c & 2) ? hi.y() : lo.y(), (c & 4) ? hi.z() : lo.z()});
  b.quad(0, 2, 3, 1);
  b.quad(4, 5, 7, 6);
  b.quad(0, 1, 5, 4);
  b.quad(2, 6, 7, 3);
  b.quad(0, 4, 6, 2);
  b.quad(1, 3, 7, 5);
  return b.build();
}

TriangleMesh cube(double half) { return box(Vec3::Constant(-half), Vec3::Constant(half)); }

TriangleMesh subdivided_cube(int n) {
  std::vector<double> coords;
  for (int i = 0; i <= n; ++i) coords.push_back(-1.0 + 2.0 * i / n);
  coords.back() = 1.0;
  return cube_grid(coords, [](const Vec3& p) { return p; });
}

TriangleMesh rounded_cube(double radius, int flat_steps, int arc_steps) {
  const double inner = 1.0 - radius;
  std::vector<double> coords;
  coords.push_back(-1.0);
  for (int k = arc_steps - 1; k >= 1; --k) coords.push_back(-inner - radius * std::tan(k * M_PI / 4.0 / arc_steps));
  for (int i = 0; i <= flat_steps; ++i) coords.push_back(-inner + 2.0 * inner * i / flat_steps);
  for (int k = 1; k < arc_steps; ++k) coords.push_back(inner + radius * std::tan(k * M_PI / 4.0 / arc_steps));
  coords.push_back(1.0);
  return cube_grid(coords, [&](const Vec3& p) {
    const Vec3 core = p.cwiseMax(Vec3::Constant(-inner)).cwiseMin(Vec3::Constant(inner));
    const Vec3 d = p - core;
    return Vec3(core + radius * d.normalized());
  });
}

TriangleMesh tetrahedron() {
  return orient_convex({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

TriangleMesh octahedron() {
  std::vector<Vec3> v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<Triangle> t;
  for (std::uint32_t x : {0u, 1u}) {
    for (std::uint32_t y : {2u, 3u}) {
      for (std::uint32_t z : {4u, 5u}) t.push_back({x, y, z});
    }
  }
  return orient_convex(v, t);
}

TriangleMesh icosahedron() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                         {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<Triangle> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return orient_convex(v, t);
}

TriangleMesh icosphere(int level, double radius, const Vec3& center) {
  TriangleMesh base = icosahedron();
  std::vector<Vec3> v = base.positions();
  std::vector<Triangle> t = base.triangles();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto id = static_cast<std::uint32_t>(v.size() - 1);
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    for (const auto& tri : t) {
      const auto ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    t = std::move(next);
  }
  for (auto& p : v) p = center + radius * p;
  return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh uv_sphere(int rings, int segments, double radius) {
  std::vector<Vec3> v = {{0, 0, radius}, {0, 0, -radius}};
  for (int r = 1; r < rings; ++r) {
    const double phi = M_PI * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double th = 2.0 * M_PI * s / segments;
      v.push_back(radius * Vec3(std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th), std::cos(phi)));
    }
  }
  auto at = [&](int r, int s) { return static_cast<std::uint32_t>(2 + (r - 1) * segments + (s % segments)); };
  std::vector<Triangle> t;
  for (int s = 0; s < segments; ++s) {
    t.push_back({0, at(1, s), at(1, s + 1)});
    t.push_back({1, at(rings - 1, s + 1), at(rings - 1, s)});
    for (int r = 1; r + 1 < rings; ++r) {
      t.push_back({at(r, s), at(r + 1, s), at(r + 1, s + 1)});
      t.push_back({at(r, s), at(r + 1, s + 1), at(r, s + 1)});
    }
  }
  return orient_convex(v, t);
}

TriangleMesh torus(double major, double minor, int rings, int segments) {
  Builder b;
  for (int i = 0; i < rings; ++i) {
    const double th = 2.0 * M_PI * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double ph = 2.0 * M_PI * j / segments;
      b.add({(major + minor * std::cos(ph)) * std::cos(th), (major + minor * std::cos(ph)) * std::sin(th),
             minor * std::sin(ph)});
    }
  }
  auto at = [&](int i, int j) { return static_cast<std::uint32_t>((i % rings) * segments + (j % segments)); };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < segments; ++j) b.quad(at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
  }
  return b.build();
}

TriangleMesh extrude(const std::vector<std::pair<double, double>>& polygon, double z0, double z1) {
  Builder b;
  const auto n = static_cast<std::uint32_t>(polygon.size());
  for (const auto& [x, y] : polygon) b.add({x, y, z0});
  for (const auto& [x, y] : polygon) b.add({x, y, z1});
  for (const auto& tri : triangulate(polygon)) {
    const auto a = static_cast<std::uint32_t>(tri[0]), c = static_cast<std::uint32_t>(tri[1]),
               d = static_cast<std::uint32_t>(tri[2]);
    b.tri(a, d, c);
    b.tri(n + a, n + c, n + d);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    b.quad(i, j, n + j, n + i);
  }
  return b.build();
}

namespace {

std::vector<std::pair<double, double>> regular_polygon(int sides, double radius) {
  std::vector<std::pair<double, double>> p;
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * M_PI * i / sides;
    p.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return p;
}

}  // namespace

TriangleMesh cylinder(int segments, double radius, double height) {
  return extrude(regular_polygon(segments, radius), -height / 2, height / 2);
}

TriangleMesh cone(int segments, double radius, double height) {
  std::vector<Vec3> v = {{0, 0, height / 2}, {0, 0, -height / 2}};
  for (const auto& [x, y] : regular_polygon(segments, radius)) v.push_back({x, y, -height / 2});
  std::vector<Triangle> t;
  for (int s = 0; s < segments; ++s) {
    const auto a = static_cast<std::uint32_t>(2 + s), b = static_cast<std::uint32_t>(2 + (s + 1) % segments);
    t.push_back({0, a, b});
    t.push_back({1, b, a});
  }
  return orient_convex(v, t);
}

TriangleMesh l_bracket() { return extrude({{0, 0}, {2, 0}, {2, 0.6}, {0.6, 0.6}, {0.6, 2}, {0, 2}}, 0.0, 1.0); }

TriangleMesh star_prism(int points) {
  std::vector<std::pair<double, double>> p;
  for (int i = 0; i < 2 * points; ++i) {
    const double a = M_PI * i / points + M_PI / 2;
    const double r = (i % 2 == 0) ? 1.0 : 0.45;
    p.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return extrude(p, -0.3, 0.3);
}

TriangleMesh cross_prism() {
  return extrude({{-0.3, -1}, {0.3, -1}, {0.3, -0.3}, {1, -0.3}, {1, 0.3}, {0.3, 0.3},
                  {0.3, 1}, {-0.3, 1}, {-0.3, 0.3}, {-1, 0.3}, {-1, -0.3}, {-0.3, -0.3}},
                 -0.4, 0.4);
}

TriangleMesh hex_prism() { return extrude(regular_polygon(6, 1.0), -0.5, 0.5); }

TriangleMesh wedge() { return extrude({{0, 0}, {2, 0}, {0, 1}}, 0.0, 1.5); }

TriangleMesh pyramid() {
  return orient_convex({{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}, {0, 0, 1.2}},
                       {{0, 1, 2}, {0, 2, 3}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

TriangleMesh thin_plate() { return box({-1, -1, -0.08}, {1, 1, 0.08}); }

TriangleMesh square_prism_with_fillets(int rounded, double radius) {
  const std::pair<double, double> corners[4] = {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
  std::vector<std::pair<double, double>> p;
  for (int c = 0; c < 4; ++c) {
    if (c >= rounded) {
      p.push_back(corners[c]);
      continue;
    }
    const double cx = corners[c].first - radius * (corners[c].first > 0 ? 1 : -1);
    const double cy = corners[c].second - radius * (corners[c].second > 0 ? 1 : -1);
    const double start = std::atan2(corners[c].second, corners[c].first) - M_PI / 4;
    for (int k = 0; k <= 12; ++k) {
      const double a = start + (M_PI / 2) * k / 12;
      p.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});
    }
  }
  return extrude(p, -1.0, 1.0);
}

TriangleMesh open_patch(double x0, double y0, double x1, double y1, double z0, int n) {
  Builder b;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) b.add({x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n, z0});
  }
  auto at = [&](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) b.quad(at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
  }
  return b.build();
}

TriangleMesh open_disk(int segments, double radius) {
  Builder b;
  b.add({0, 0, 0});
  for (const auto& [x, y] : regular_polygon(segments, radius)) b.add({x, y, 0.1 * x * y});
  for (int s = 0; s < segments; ++s) {
    b.tri(0, static_cast<std::uint32_t>(1 + s), static_cast<std::uint32_t>(1 + (s + 1) % segments));
  }
  return b.build();
}

TriangleMesh open_box() {
  const TriangleMesh c = cube();
  std::vector<Triangle> t(c.triangles().begin(), c.triangles().end());
  t.erase(t.begin() + 2, t.begin() + 4);  // the +z face
  return TriangleMesh(c.positions(), std::move(t));
}

TriangleMesh single_triangle() { return TriangleMesh({{-1, -0.8, 0.1}, {1, -0.5, -0.2}, {0.1, 1, 0.3}}, {{0, 1, 2}}); }

TriangleMesh concentric_shells(double outer, double inner) {
  return merge({icosphere(3, outer), flipped(icosphere(3, inner))});
}

TriangleMesh two_cubes_apart() { return merge({box({-1, -0.4, -0.4}, {-0.2, 0.4, 0.4}), box({0.2, -0.4, -0.4}, {1, 0.4, 0.4})}); }

TriangleMesh overlapping_cubes() { return merge({box({-1, -1, -1}, {0.3, 0.3, 0.3}), box({-0.3, -0.3, -0.3}, {1, 1, 1})}); }

TriangleMesh nonmanifold_edge() {
  return sharpdmc::weld_vertices(merge({box({0, 0, 0}, {1, 1, 1}), box({1, 1, 0}, {2, 2, 1})}), 1e-12);
}

TriangleMesh random_soup(int triangles, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-1.0, 1.0), jitter(-0.25, 0.25);
  Builder b;
  for (int i = 0; i < triangles; ++i) {
    const Vec3 c(center(rng), center(rng), center(rng));
    const auto a = b.add(c + Vec3(jitter(rng), jitter(rng), jitter(rng)));
    const auto d = b.add(c + Vec3(jitter(rng), jitter(rng), jitter(rng)));
    const auto e = b.add(c + Vec3(jitter(rng), jitter(rng), jitter(rng)));
    b.tri(a, d, e);
  }
  return b.build();
}

std::vector<Fixture> corpus() {
  std::vector<std::pair<std::string, TriangleMesh>> shapes = {
      {"cube", cube()},
      {"flat_box", box({-1, -0.5, -0.3}, {1, 0.5, 0.3})},
      {"subdivided_cube", subdivided_cube(4)},
      {"rounded_cube", rounded_cube(0.3)},
      {"tetrahedron", tetrahedron()},
      {"octahedron", octahedron()},
      {"icosahedron", icosahedron()},
      {"icosphere1", icosphere(1)},
      {"icosphere3", icosphere(3)},
      {"uv_sphere", uv_sphere(12, 24)},
      {"torus", torus(0.7, 0.25, 32, 16)},
      {"thin_torus", torus(0.8, 0.12, 48, 16)},
      {"cylinder", cylinder(32, 0.6, 1.6)},
      {"cone", cone(32, 0.8, 1.5)},
      {"l_bracket", l_bracket()},
      {"star_prism", star_prism(5)},
      {"cross_prism", cross_prism()},
      {"hex_prism", hex_prism()},
      {"wedge", wedge()},
      {"pyramid", pyramid()},
      {"thin_plate", thin_plate()},
      {"filleted_prism", square_prism_with_fillets(2, 0.4)},
      {"open_patch", open_patch(-1, -1, 1, 1, 0.05, 3)},
      {"open_disk", open_disk(24, 1.0)},
      {"open_box", open_box()},
      {"single_triangle", single_triangle()},
      {"concentric_shells", concentric_shells()},
      {"two_cubes_apart", two_cubes_apart()},
      {"overlapping_cubes", overlapping_cubes()},
      {"nonmanifold_edge", nonmanifold_edge()},
      {"random_soup", random_soup(500, 7)},
  };
  std::vector<Fixture> out;
  for (auto& [name, mesh] : shapes) {
    const auto topo = sharpdmc::check_watertight_manifold(mesh);
    const bool closed = topo.closed && topo.edge_manifold;
    bool sharp = false;
    if (closed) {
      for (const auto& e : sharpdmc::interior_edges(mesh)) sharp = sharp || e.deviation_deg > 30.0;
    }
    out.push_back({name, std::move(mesh), closed, sharp});
  }
  return out;
}

}  // namespace fixtures
