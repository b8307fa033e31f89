#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sharpdmc {

using Vec3 = Eigen::Vector3d;

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool empty() const { return (lo.array() > hi.array()).any(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  int longest_axis() const {
    Vec3 e = extent();
    int axis = 0;
    if (e[1] > e[axis]) axis = 1;
    if (e[2] > e[axis]) axis = 2;
    return axis;
  }
  bool contains(const Aabb& b) const {
    return (lo.array() <= b.lo.array()).all() && (hi.array() >= b.hi.array()).all();
  }
  /// Squared distance from p to the box (0 inside).
  double sq_distance(const Vec3& p) const {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      double v = 0.0;
      if (p[a] < lo[a]) v = lo[a] - p[a];
      else if (p[a] > hi[a]) v = p[a] - hi[a];
      d2 += v * v;
    }
    return d2;
  }
};

/// Plane in Hessian normal form: normal . x + offset = 0.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) + offset; }
  double distance(const Vec3& p) const { return std::abs(signed_distance(p)); }

  static Plane through(const Vec3& a, const Vec3& b, const Vec3& c) {
    Plane pl;
    pl.normal = (b - a).cross(c - a).normalized();
    // Averaging over the three vertices keeps all of them within rounding of the plane.
    pl.offset = -(pl.normal.dot(a) + pl.normal.dot(b) + pl.normal.dot(c)) / 3.0;
    return pl;
  }
};

enum class FeatureKind : std::uint8_t { Face, Edge, Vertex };

/// Which part of a triangle a closest point lies on. Local edge e joins local
/// vertices e and (e + 1) % 3.
struct Feature {
  FeatureKind kind = FeatureKind::Face;
  std::uint8_t local_id = 0;

  friend bool operator==(const Feature&, const Feature&) = default;
};

struct TriangleClosest {
  Vec3 point;
  std::array<double, 3> barycentric{};
  double sq_distance = 0.0;
};

/// Closest point on triangle abc to p (Voronoi-region walk; barycentrics are
/// exact zeros on the edge and vertex regions).
inline TriangleClosest closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                           const Vec3& c) {
  TriangleClosest r;
  auto finish = [&](double u, double v, double w) {
    r.barycentric = {u, v, w};
    r.point = u * a + v * b + w * c;
    r.sq_distance = (p - r.point).squaredNorm();
    return r;
  };

  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return finish(1, 0, 0);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return finish(0, 1, 0);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return finish(1 - v, v, 0);
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return finish(0, 0, 1);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return finish(1 - w, 0, w);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return finish(0, 1 - w, w);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return finish(1.0 - v - w, v, w);
}

/// Feature of a closest point given its barycentrics: coordinates at or below
/// tol count as zero.
inline Feature classify_feature(const std::array<double, 3>& bary, double tol) {
  int zero_count = 0;
  int nonzero = -1;
  int zero = -1;
  for (int i = 0; i < 3; ++i) {
    if (bary[i] <= tol) {
      ++zero_count;
      zero = i;
    } else {
      nonzero = i;
    }
  }
  if (zero_count == 0) return {FeatureKind::Face, 0};
  if (zero_count == 1) {
    // Edge opposite vertex `zero` joins (zero+1) and (zero+2).
    return {FeatureKind::Edge, static_cast<std::uint8_t>((zero + 1) % 3)};
  }
  if (nonzero < 0) {
    // All three below tol only happens for degenerate input; pick the largest.
    nonzero = static_cast<int>(std::max_element(bary.begin(), bary.end()) - bary.begin());
  }
  return {FeatureKind::Vertex, static_cast<std::uint8_t>(nonzero)};
}

/// Separating-axis overlap test between triangle (a, b, c) and the box with the
/// given center and half extents. Touching counts as overlap.
bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c);

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace sharpdmc
