#pragma once

#include "sharpdmc/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sharpdmc {

using Triangle = std::array<std::uint32_t, 3>;

/// Maps source coordinates into normalized space: n = scale * p + translation.
struct NormalizationTransform {
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * p + translation; }
  Vec3 invert(const Vec3& n) const { return (n - translation) / scale; }
  NormalizationTransform inverse() const { return {1.0 / scale, -translation / scale}; }
  /// this after other.
  NormalizationTransform compose(const NormalizationTransform& other) const {
    return {scale * other.scale, scale * other.translation + translation};
  }
  bool is_identity(double tol = 0.0) const {
    return std::abs(scale - 1.0) <= tol && translation.cwiseAbs().maxCoeff() <= tol;
  }
};

struct Provenance {
  std::string source_path;
  NormalizationTransform transform;
};

/// Indexed triangle mesh. Counter-clockwise winding is outward. Immutable once
/// built; every constructor path validates indices.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles,
               Provenance provenance = {});

  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Provenance& provenance() const { return provenance_; }

  std::size_t vertex_count() const { return positions_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  const Vec3& corner(std::size_t tri, int k) const { return positions_[triangles_[tri][k]]; }
  Aabb bounds() const;
  double triangle_area(std::size_t tri) const;
  /// Unit face normal from CCW winding (zero for degenerate faces).
  Vec3 face_normal(std::size_t tri) const;
  /// Area-weighted per-vertex normals.
  std::vector<Vec3> vertex_normals() const;
  double surface_area() const;

  /// Same connectivity, positions mapped through t; provenance transform is
  /// composed so the result still knows how to return to source units.
  TriangleMesh transformed(const NormalizationTransform& t) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<Triangle> triangles_;
  Provenance provenance_;
};

/// Merges vertices closer than tol (absolute). Representative is the first
/// occurrence; triangles that collapse are dropped, others keep their order.
TriangleMesh weld_vertices(const TriangleMesh& mesh, double tol);

/// Drops triangles with repeated indices or area <= area_tol.
TriangleMesh drop_degenerate(const TriangleMesh& mesh, double area_tol);

/// Longest bounding-box axis maps to [-1 + padding, 1 - padding], centered.
std::pair<TriangleMesh, NormalizationTransform> normalize_to_unit_cube(const TriangleMesh& mesh,
                                                                      double padding);

struct TopologyReport {
  bool edge_manifold = false;
  bool closed = false;
  bool oriented = false;
  long long euler_characteristic = 0;
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
};

/// Edges are keyed by exact-position-welded vertex ids, so duplicated seams in
/// a soup do not count as boundaries.
TopologyReport check_watertight_manifold(const TriangleMesh& mesh);

/// Number of edge-connected triangle components (on the exact-welded mesh).
std::size_t connected_components(const TriangleMesh& mesh);

/// Edge shared by exactly two triangles (on the exact-welded mesh).
struct InteriorEdge {
  std::uint32_t a, b;          // vertex ids of one occurrence
  std::uint32_t faces[2];
  double deviation_deg;        // angle between the two face normals
};

/// Interior edges sorted by welded edge key. Boundary edges are skipped;
/// throws NonManifoldInput for edges with more than two triangles.
std::vector<InteriorEdge> interior_edges(const TriangleMesh& mesh);

struct DihedralEdge {
  double angle_deg;  // 180 = coplanar, 90 = right-angle crease
  double length;
};

/// Dihedral angle of every interior edge. Throws NonManifoldInput unless the
/// mesh is closed and edge-manifold.
std::vector<DihedralEdge> dihedral_angles(const TriangleMesh& mesh);

struct DihedralHistogram {
  std::vector<double> weights;  // edge length per bin over [0, 180]
  double bin_width_deg = 0.0;

  double total() const;
  /// Mass in [lo_deg, hi_deg], bins counted when their center falls inside.
  double mass_between(double lo_deg, double hi_deg) const;
};

DihedralHistogram dihedral_histogram(const TriangleMesh& mesh, int bins);

/// Fraction of sharp-edge length (dihedral <= sharp_max_deg) whose dihedral
/// lies within tolerance_deg of target_deg. Zero when there are no sharp edges.
double crease_fraction_near(const TriangleMesh& mesh, double target_deg, double tolerance_deg,
                            double sharp_max_deg = 150.0);

/// Ray-parity point-in-solid test along a fixed skewed direction.
bool ray_parity_inside(const TriangleMesh& mesh, const Vec3& p);

}  // namespace sharpdmc
