#include "sharpdmc/geometry.hpp"

namespace sharpdmc {

namespace {

bool separated_on(const Vec3& axis, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                  const Vec3& half) {
  const double p0 = axis.dot(v0);
  const double p1 = axis.dot(v1);
  const double p2 = axis.dot(v2);
  const double r = half[0] * std::abs(axis[0]) + half[1] * std::abs(axis[1]) +
                   half[2] * std::abs(axis[2]);
  const double lo = std::min({p0, p1, p2});
  const double hi = std::max({p0, p1, p2});
  return lo > r || hi < -r;
}

}  // namespace

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
  const Vec3 v0 = a - center;
  const Vec3 v1 = b - center;
  const Vec3 v2 = c - center;

  // Box face normals.
  for (int k = 0; k < 3; ++k) {
    const double lo = std::min({v0[k], v1[k], v2[k]});
    const double hi = std::max({v0[k], v1[k], v2[k]});
    if (lo > half[k] || hi < -half[k]) return false;
  }

  // Triangle normal.
  const Vec3 e0 = v1 - v0;
  const Vec3 e1 = v2 - v1;
  const Vec3 e2 = v0 - v2;
  const Vec3 n = e0.cross(e1);
  if (n.squaredNorm() > 0.0 && separated_on(n, v0, v1, v2, half)) return false;

  // Nine edge cross products.
  const Vec3 edges[3] = {e0, e1, e2};
  for (const auto& e : edges) {
    for (int k = 0; k < 3; ++k) {
      Vec3 axis = Vec3::Unit(k).cross(e);
      if (axis.squaredNorm() == 0.0) continue;
      if (separated_on(axis, v0, v1, v2, half)) return false;
    }
  }
  return true;
}

}  // namespace sharpdmc
