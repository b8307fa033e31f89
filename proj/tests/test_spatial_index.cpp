#include "fixtures.hpp"
#include "oracles.hpp"

#include "sharpdmc/bvh.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

using namespace sharpdmc;

namespace {

const TriangleMesh kUnitTriangle({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});

/// Triangle ids reachable from the root, in traversal order.
std::vector<std::uint32_t> reachable(const TriangleBVH& bvh) {
  std::vector<std::uint32_t> out;
  std::function<void(std::uint32_t)> walk = [&](std::uint32_t n) {
    const auto& node = bvh.nodes()[n];
    if (node.count > 0) {
      for (std::uint32_t k = 0; k < node.count; ++k) out.push_back(bvh.leaf_order()[node.first + k]);
      return;
    }
    walk(node.left);
    walk(node.left + 1);
  };
  walk(0);
  return out;
}

Aabb triangle_box(const TriangleMesh& m, std::uint32_t t) {
  Aabb b;
  for (int k = 0; k < 3; ++k) b.expand(m.corner(t, k));
  return b;
}

}  // namespace

TEST_CASE("one triangle builds a single leaf") {
  TriangleBVH bvh(kUnitTriangle);
  REQUIRE(bvh.nodes().size() == 1);
  CHECK(bvh.nodes()[0].count == 1);
  CHECK(bvh.depth() == 1);
}

TEST_CASE("cube tree is shallow and every triangle sits in exactly one leaf") {
  TriangleBVH bvh(fixtures::cube());
  CHECK(bvh.depth() <= 6);
  auto ids = reachable(bvh);
  std::sort(ids.begin(), ids.end());
  std::vector<std::uint32_t> expected(12);
  for (std::uint32_t i = 0; i < 12; ++i) expected[i] = i;
  CHECK(ids == expected);
}

TEST_CASE("node boxes contain their descendants over the corpus") {
  for (const auto& f : fixtures::corpus()) {
    CAPTURE(f.name);
    TriangleBVH bvh(f.mesh);
    auto ids = reachable(bvh);
    CHECK(ids.size() == f.mesh.triangle_count());
    CHECK(std::set<std::uint32_t>(ids.begin(), ids.end()).size() == f.mesh.triangle_count());
    std::function<Aabb(std::uint32_t)> check = [&](std::uint32_t n) -> Aabb {
      const auto& node = bvh.nodes()[n];
      Aabb content;
      if (node.count > 0) {
        CHECK(node.count <= TriangleBVH::kLeafSize);
        for (std::uint32_t k = 0; k < node.count; ++k) content.expand(triangle_box(f.mesh, bvh.leaf_order()[node.first + k]));
      } else {
        content.expand(check(node.left));
        content.expand(check(node.left + 1));
      }
      CHECK(node.box.contains(content));
      return content;
    };
    check(0);
  }
}

TEST_CASE("rebuilding gives the same traversal order") {
  const TriangleMesh m = fixtures::torus(0.7, 0.25, 32, 16);
  TriangleBVH a(m), b(m);
  CHECK(a.leaf_order() == b.leaf_order());
  CHECK(reachable(a) == reachable(b));
}

TEST_CASE("nearest point on the unit triangle") {
  TriangleBVH bvh(kUnitTriangle);
  auto face = bvh.nearest_point({0.25, 0.25, 1});
  CHECK((face.point - Vec3(0.25, 0.25, 0)).norm() < 1e-15);
  CHECK(face.distance == doctest::Approx(1.0));
  CHECK(face.feature == Feature{FeatureKind::Face, 0});

  auto vertex = bvh.nearest_point({2, 0, 0});
  CHECK((vertex.point - Vec3(1, 0, 0)).norm() == 0.0);
  CHECK(vertex.feature.kind == FeatureKind::Vertex);
  CHECK(vertex.feature.local_id == 1);

  auto edge = bvh.nearest_point({0.5, -1, 0});
  CHECK(edge.feature == Feature{FeatureKind::Edge, 0});
  CHECK(edge.distance == doctest::Approx(1.0));
}

TEST_CASE("nearest point matches the linear scan over the corpus") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int compared = 0;
  for (const auto& f : fixtures::corpus()) {
    CAPTURE(f.name);
    TriangleBVH bvh(f.mesh);
    std::uint32_t hint = 0;
    for (int i = 0; i < 100; ++i) {
      const Vec3 p(u(rng), u(rng), u(rng));
      const auto hit = bvh.nearest_point(p);
      const auto ref = oracle::nearest(f.mesh, p);
      CHECK(hit.distance == doctest::Approx(ref.distance).epsilon(1e-12));
      // Same triangle unless another one is exactly as close.
      if (hit.triangle_id != ref.triangle) {
        const Vec3 q = oracle::closest_point(p, f.mesh.corner(hit.triangle_id, 0), f.mesh.corner(hit.triangle_id, 1),
                                             f.mesh.corner(hit.triangle_id, 2));
        CHECK((p - q).norm() == doctest::Approx(ref.distance).epsilon(1e-12));
      }
      CHECK((hit.point - ref.point).norm() < 1e-9 + 1e-9 * ref.distance);
      const double sum = hit.barycentric[0] + hit.barycentric[1] + hit.barycentric[2];
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      for (double b : hit.barycentric) CHECK(b >= -1e-12);
      CHECK(hit.feature == classify_feature(hit.barycentric, bvh.feature_tolerance()));
      // A hinted query returns the identical hit.
      const auto hinted = bvh.nearest_point(p, hint);
      CHECK(hinted.triangle_id == hit.triangle_id);
      CHECK(hinted.distance == hit.distance);
      hint = hit.triangle_id;
      ++compared;
    }
  }
  CHECK(compared >= 1000);
}

TEST_CASE("incident sets on the cube") {
  const TriangleMesh cube = fixtures::cube(0.5);
  TriangleBVH bvh(cube);
  // Inside a face, away from the diagonal.
  const auto face = bvh.nearest_point({0.3, -0.1, 1.0});
  CHECK(bvh.incident_triangles(face, 1e-7).size() == 1);

  // On the diagonal of the +z face: both halves of that face.
  const auto diag = bvh.nearest_point({0.1, 0.1, 1.0});
  REQUIRE(diag.feature.kind == FeatureKind::Edge);
  CHECK(bvh.incident_triangles(diag, 1e-7).size() == 2);

  // On a crease: the two triangles on either side.
  const auto crease = bvh.nearest_point({1.0, 0.1, 1.0});
  REQUIRE(crease.feature.kind == FeatureKind::Edge);
  CHECK(bvh.incident_triangles(crease, 1e-7).size() == 2);

  // Corner (-0.5, -0.5, -0.5): compare against a scan for the corner position.
  const auto corner = bvh.nearest_point({-1, -1, -1});
  REQUIRE(corner.feature.kind == FeatureKind::Vertex);
  auto got = bvh.incident_triangles(corner, 1e-7);
  std::sort(got.begin(), got.end());
  std::vector<std::uint32_t> expected;
  for (std::uint32_t t = 0; t < cube.triangle_count(); ++t) {
    for (int k = 0; k < 3; ++k) {
      if (cube.corner(t, k) == Vec3(-0.5, -0.5, -0.5)) expected.push_back(t);
    }
  }
  CHECK(got == expected);
  CHECK(got.size() >= 3);
  CHECK(got.size() <= 6);
}

TEST_CASE("incident sets follow welded positions in an unwelded soup") {
  // Cube with every triangle owning its own three vertices.
  const TriangleMesh cube = fixtures::cube();
  std::vector<Vec3> v;
  std::vector<Triangle> t;
  for (std::size_t f = 0; f < cube.triangle_count(); ++f) {
    const auto base = static_cast<std::uint32_t>(v.size());
    for (int k = 0; k < 3; ++k) v.push_back(cube.corner(f, k));
    t.push_back({base, base + 1, base + 2});
  }
  TriangleBVH soup(TriangleMesh(v, t));
  TriangleBVH welded(cube);
  for (const Vec3& p : {Vec3(2, 2, 2), Vec3(2, 0.2, 2), Vec3(0.1, 0.1, 3)}) {
    CHECK(soup.incident_triangles(soup.nearest_point(p), 1e-7).size() ==
          welded.incident_triangles(welded.nearest_point(p), 1e-7).size());
  }
}

TEST_CASE("triangle-box separating axes agree with polygon clipping") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.05, 0.6);
  int overlaps = 0, total = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec3 center(u(rng), u(rng), u(rng));
    const Vec3 half(s(rng), s(rng), s(rng));
    const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
    const bool sat = triangle_box_overlap(center, half, a, b, c);
    // Decide only when a slightly grown and a slightly shrunk box agree.
    const bool grown = oracle::triangle_box_overlap(center, half * (1 + 1e-9) + Vec3::Constant(1e-12), a, b, c);
    const bool shrunk = oracle::triangle_box_overlap(center, half * (1 - 1e-9), a, b, c);
    if (grown != shrunk) continue;
    CHECK(sat == grown);
    overlaps += grown;
    ++total;
  }
  CHECK(total > 19000);
  CHECK(overlaps > 1000);
  CHECK(overlaps < total - 1000);
}

TEST_CASE("touching counts as overlap") {
  const Vec3 a(1, -1, 0), b(1, 1, 0), c(1, 0, 1);  // lies in the box's x = 1 face
  CHECK(triangle_box_overlap(Vec3::Zero(), Vec3::Ones(), a, b, c));
  CHECK_FALSE(triangle_box_overlap(Vec3::Zero(), Vec3::Ones(), a + Vec3(1e-9, 0, 0), b + Vec3(1e-9, 0, 0),
                                   c + Vec3(1e-9, 0, 0)));
}
