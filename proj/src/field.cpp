#include "sharpdmc/field.hpp"

#include "sharpdmc/error.hpp"

namespace sharpdmc {

LinfField::LinfField(std::shared_ptr<const TriangleBVH> bvh, double epsilon, DistanceMode mode,
                     double envelope_cap)
    : bvh_(std::move(bvh)), epsilon_(epsilon), mode_(mode), envelope_cap_(envelope_cap) {
  if (!(epsilon_ > 0.0)) throw Error(Errc::InvalidConfig, "epsilon must be positive");
  if (!(envelope_cap_ >= 1.0)) throw Error(Errc::InvalidConfig, "envelope cap must be >= 1");
  const TriangleMesh& mesh = bvh_->mesh();
  const double half = 0.5 * mesh.bounds().extent().maxCoeff();
  const double area_tol = 1e-12 * half * half;
  planes_.resize(mesh.triangle_count());
  plane_valid_.assign(mesh.triangle_count(), 0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    if (mesh.triangle_area(t) <= area_tol) continue;
    planes_[t] = Plane::through(mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
    plane_valid_[t] = 1;
  }
}

double LinfField::linf_from_hit(const Vec3& p, const NearestHit& hit, Vec3* gradient) const {
  double best = -1.0;
  std::uint32_t arg = hit.triangle_id;
  bvh_->for_each_incident(hit, bvh_->feature_tolerance(), [&](std::uint32_t t) {
    if (!plane_valid_[t]) return;
    const double d = planes_[t].distance(p);
    if (d > best || (d == best && t < arg)) {
      best = d;
      arg = t;
    }
  });
  if (best < 0.0) {
    // Every incident triangle is degenerate; fall back to the point distance.
    if (gradient && hit.distance > 0.0) *gradient = (p - hit.point) / hit.distance;
    return hit.distance;
  }
  if (gradient) {
    const double s = planes_[arg].signed_distance(p);
    *gradient = s > 0.0 ? planes_[arg].normal : (s < 0.0 ? Vec3(-planes_[arg].normal) : Vec3::Zero());
  }
  return best;
}

double LinfField::linf_distance(const Vec3& p) const {
  return linf_from_hit(p, bvh_->nearest_point(p), nullptr);
}

double LinfField::l2_distance(const Vec3& p) const { return bvh_->nearest_point(p).distance; }

double LinfField::distance(const Vec3& p) const {
  return mode_ == DistanceMode::Linf ? linf_distance(p) : l2_distance(p);
}

FieldSample LinfField::sample(const Vec3& p, std::uint32_t hint) const {
  FieldSample s;
  s.hit = bvh_->nearest_point(p, hint);
  s.l2 = s.hit.distance;
  const Vec3 radial = s.l2 > 0.0 ? Vec3((p - s.hit.point) / s.l2) : Vec3::Zero();
  if (mode_ == DistanceMode::Linf) {
    Vec3 g = Vec3::Zero();
    s.linf = linf_from_hit(p, s.hit, &g);
    const double capped = s.l2 / envelope_cap_;
    if (capped > s.linf) {
      s.envelope = capped;
      s.gradient = radial;
    } else {
      s.envelope = s.linf;
      s.gradient = g;
    }
  } else {
    s.linf = 0.0;
    s.envelope = s.l2;
    s.gradient = radial;
  }
  return s;
}

double LinfField::occupancy_margin(const Vec3& p) const { return epsilon_ - sample(p).envelope; }

}  // namespace sharpdmc
