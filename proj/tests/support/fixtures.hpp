#pragma once

#include "sharpdmc/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fixtures {

using sharpdmc::TriangleMesh;
using sharpdmc::Vec3;

TriangleMesh cube(double half = 1.0);
TriangleMesh box(const Vec3& lo, const Vec3& hi);
/// Cube whose faces are split into n x n quads.
TriangleMesh subdivided_cube(int n);
/// Box of half-size 1 with every crease rounded to `radius`, arcs split into
/// `arc_steps` segments per face side.
TriangleMesh rounded_cube(double radius, int flat_steps = 8, int arc_steps = 6);
TriangleMesh tetrahedron();
TriangleMesh octahedron();
TriangleMesh icosahedron();
TriangleMesh icosphere(int level, double radius = 1.0, const Vec3& center = Vec3::Zero());
TriangleMesh uv_sphere(int rings, int segments, double radius = 1.0);
TriangleMesh torus(double major, double minor, int rings, int segments);
TriangleMesh cylinder(int segments, double radius, double height);
TriangleMesh cone(int segments, double radius, double height);
/// Simple CCW polygon in the xy-plane extruded over z in [z0, z1].
TriangleMesh extrude(const std::vector<std::pair<double, double>>& polygon, double z0, double z1);
TriangleMesh l_bracket();
TriangleMesh star_prism(int points);
TriangleMesh cross_prism();
TriangleMesh hex_prism();
TriangleMesh wedge();
TriangleMesh pyramid();
TriangleMesh thin_plate();
/// Extruded square with `rounded` of its four vertical creases filleted.
TriangleMesh square_prism_with_fillets(int rounded, double radius);
/// Axis-aligned square patch at z = z0 with corners (x0, y0), (x1, y1), split into n x n quads.
TriangleMesh open_patch(double x0, double y0, double x1, double y1, double z0, int n = 1);
TriangleMesh open_disk(int segments, double radius);
TriangleMesh open_box();  // cube without its top face
TriangleMesh single_triangle();
/// Outer sphere plus an inner sphere: a hollow solid.
TriangleMesh concentric_shells(double outer = 1.0, double inner = 0.5);
TriangleMesh two_cubes_apart();
TriangleMesh overlapping_cubes();
/// Two cubes touching along one edge: that edge has four triangles.
TriangleMesh nonmanifold_edge();
TriangleMesh random_soup(int triangles, std::uint64_t seed);

TriangleMesh merge(const std::vector<TriangleMesh>& parts);
TriangleMesh flipped(const TriangleMesh& mesh);

struct Fixture {
  std::string name;
  TriangleMesh mesh;
  bool closed;  // watertight two-manifold input
  bool sharp;   // has creases deviating by more than 30 degrees
};

/// The shape corpus shared by the manifold, codec and distance tests.
std::vector<Fixture> corpus();

}  // namespace fixtures
