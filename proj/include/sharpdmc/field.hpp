#pragma once

#include "sharpdmc/bvh.hpp"

#include <memory>

namespace sharpdmc {

enum class DistanceMode { Linf, L2 };

/// Ratio bounding how far the envelope may reach beyond the Euclidean offset.
/// The L-infinity distance never exceeds the Euclidean one, but it can be
/// arbitrarily smaller near needle-like tips; the occupancy margin therefore
/// uses max(D, |P - Q| / cap), so {g >= 0} stays within cap * epsilon of the
/// surface and the voxelizer's band can contain it.
inline constexpr double kDefaultEnvelopeCap = 2.0;

struct FieldSample {
  NearestHit hit;
  double l2 = 0.0;
  double linf = 0.0;
  /// Distance the margin uses: max(mode distance, l2 / cap).
  double envelope = 0.0;
  /// Unit gradient of the envelope distance (zero on the surface itself).
  Vec3 gradient = Vec3::Zero();
};

/// Unsigned distance queries against a mesh: the incident-plane maximum
/// (L-infinity mode), plain Euclidean distance (L2 mode), and the occupancy
/// margin g = epsilon - distance.
class LinfField {
 public:
  LinfField(std::shared_ptr<const TriangleBVH> bvh, double epsilon,
            DistanceMode mode = DistanceMode::Linf, double envelope_cap = kDefaultEnvelopeCap);

  const TriangleBVH& bvh() const { return *bvh_; }
  double epsilon() const { return epsilon_; }
  DistanceMode mode() const { return mode_; }
  double envelope_cap() const { return envelope_cap_; }
  /// Radius beyond which the margin is guaranteed negative.
  double reach() const { return envelope_cap_ * epsilon_; }
  const std::vector<Plane>& planes() const { return planes_; }
  bool plane_valid(std::uint32_t tri) const { return plane_valid_[tri] != 0; }

  /// max over T(Q) of d(P, plane_i), Q the nearest surface point.
  double linf_distance(const Vec3& p) const;
  double l2_distance(const Vec3& p) const;
  /// Distance in the field's mode, without the envelope cap.
  double distance(const Vec3& p) const;
  double occupancy_margin(const Vec3& p) const;

  FieldSample sample(const Vec3& p, std::uint32_t hint = ~0u) const;

 private:
  double linf_from_hit(const Vec3& p, const NearestHit& hit, Vec3* gradient) const;

  std::shared_ptr<const TriangleBVH> bvh_;
  double epsilon_;
  DistanceMode mode_;
  double envelope_cap_;
  std::vector<Plane> planes_;
  std::vector<char> plane_valid_;
};

}  // namespace sharpdmc
