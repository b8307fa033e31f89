#include "sharpdmc/metrics.hpp"

#include "sharpdmc/bvh.hpp"
#include "sharpdmc/error.hpp"
#include "sharpdmc/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <numeric>
#include <random>

namespace sharpdmc {

namespace {

/// |a . b| for unit vectors, written so identical normals give exactly 1.
double normal_consistency(const Vec3& a, const Vec3& b) {
  return 1.0 - 0.5 * std::min((a - b).squaredNorm(), (a + b).squaredNorm());
}

double f1_from(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

struct OneWay {
  double mean_sq = 0.0;
  double within_tau = 0.0;  // fraction
  double consistency = 0.0;
};

/// Reduces per-sample results in index order so the sums are thread-independent.
OneWay reduce(const std::vector<double>& sq, const std::vector<double>& cons, double tau) {
  OneWay out;
  if (sq.empty()) return out;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    out.mean_sq += sq[i];
    out.consistency += cons[i];
    if (std::sqrt(sq[i]) <= tau) ++hits;
  }
  const double n = static_cast<double>(sq.size());
  out.mean_sq /= n;
  out.consistency /= n;
  out.within_tau = static_cast<double>(hits) / n;
  return out;
}

OneWay sample_to_sample(const SurfaceSample& from, const PointKdTree& tree, const SurfaceSample& to, double tau) {
  std::vector<double> sq(from.count()), cons(from.count());
  parallel_for(from.count(), 0, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto [idx, d2] = tree.nearest(from.points[i]);
      sq[i] = d2;
      cons[i] = normal_consistency(from.normals[i], to.normals[idx]);
    }
  });
  return reduce(sq, cons, tau);
}

OneWay sample_to_surface(const SurfaceSample& from, const TriangleBVH& bvh, double tau, int threads) {
  std::vector<double> sq(from.count()), cons(from.count());
  parallel_for(from.count(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const NearestHit hit = bvh.nearest_point(from.points[i]);
      sq[i] = hit.distance * hit.distance;
      cons[i] = normal_consistency(from.normals[i], bvh.mesh().face_normal(hit.triangle_id));
    }
  });
  return reduce(sq, cons, tau);
}

}  // namespace

SurfaceSample sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.empty()) throw Error(Errc::EmptyMesh, "cannot sample an empty mesh");
  std::vector<double> cumulative(mesh.triangle_count());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    total += mesh.triangle_area(t);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw Error(Errc::EmptyMesh, "mesh has zero surface area");

  SurfaceSample out;
  out.seed = seed;
  out.points.reserve(n);
  out.normals.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Vec3 p = (1.0 - r1) * mesh.corner(t, 0) + r1 * (1.0 - r2) * mesh.corner(t, 1) + r1 * r2 * mesh.corner(t, 2);
    out.points.push_back(p);
    out.normals.push_back(mesh.face_normal(t));
  }
  return out;
}

PointKdTree::PointKdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  std::vector<std::uint32_t> ids(points_.size());
  std::iota(ids.begin(), ids.end(), 0u);
  nodes_.reserve(points_.size());
  root_ = build(ids, 0, ids.size(), 0);
}

std::int32_t PointKdTree::build(std::vector<std::uint32_t>& ids, std::size_t lo, std::size_t hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(lo), ids.begin() + static_cast<std::ptrdiff_t>(mid),
                   ids.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::uint32_t a, std::uint32_t b) {
                     return std::make_pair(points_[a][axis], a) < std::make_pair(points_[b][axis], b);
                   });
  const auto self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({ids[mid], -1, -1, axis});
  const std::int32_t left = build(ids, lo, mid, depth + 1);
  const std::int32_t right = build(ids, mid + 1, hi, depth + 1);
  nodes_[static_cast<std::size_t>(self)].left = left;
  nodes_[static_cast<std::size_t>(self)].right = right;
  return self;
}

std::pair<std::size_t, double> PointKdTree::nearest(const Vec3& q) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::int32_t stack[128];
  int top = 0;
  if (root_ >= 0) stack[top++] = root_;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    const double d2 = (points_[node.point] - q).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && node.point < best)) {
      best_d2 = d2;
      best = node.point;
    }
    const double diff = q[node.axis] - points_[node.point][node.axis];
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    if (far >= 0 && diff * diff <= best_d2) stack[top++] = far;
    if (near >= 0) stack[top++] = near;
  }
  return {best, best_d2};
}

std::string FidelityReport::to_text() const {
  char buf[256];
  std::string sharp = f1_sharp ? std::to_string(*f1_sharp) : std::string("absent");
  if (f1_sharp) {
    char s[32];
    std::snprintf(s, sizeof s, "%.6f", *f1_sharp);
    sharp = s;
  }
  std::snprintf(buf, sizeof buf, "cd=%.6f f1=%.6f f1_sharp=%s anc=%.6f tau=%g n=%zu seed=%llu", cd, f1,
                sharp.c_str(), anc, tau, n, static_cast<unsigned long long>(seed));
  std::string out = buf;
  if (!note.empty()) out += " note=\"" + note + "\"";
  return out;
}

std::string FidelityReport::to_json() const {
  nlohmann::json j;
  j["cd"] = cd;
  j["f1"] = f1;
  j["f1_sharp"] = f1_sharp ? nlohmann::json(*f1_sharp) : nlohmann::json(nullptr);
  j["anc"] = anc;
  j["tau"] = tau;
  j["n"] = n;
  j["seed"] = seed;
  if (!note.empty()) j["note"] = note;
  return j.dump();
}

FidelityReport evaluate_pair(const SurfaceSample& pred, const SurfaceSample& ref, double tau) {
  if (pred.count() == 0 || ref.count() == 0) throw Error(Errc::EmptySample, "evaluation needs non-empty samples");
  const PointKdTree pred_tree(pred.points);
  const PointKdTree ref_tree(ref.points);
  const OneWay forward = sample_to_sample(pred, ref_tree, ref, tau);
  const OneWay backward = sample_to_sample(ref, pred_tree, pred, tau);

  FidelityReport report;
  report.cd = (forward.mean_sq + backward.mean_sq) * 1e5;
  report.f1 = f1_from(forward.within_tau, backward.within_tau);
  report.anc = 0.5 * (forward.consistency + backward.consistency);
  report.tau = tau;
  report.n = pred.count();
  report.seed = pred.seed;
  return report;
}

SurfaceSample sharp_edge_sample(const TriangleMesh& mesh, std::size_t n, double angle_threshold_deg,
                                std::uint64_t seed) {
  struct Sharp {
    Vec3 a, b, normal;
  };
  std::vector<Sharp> sharp;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& e : interior_edges(mesh)) {
    if (!(e.deviation_deg > angle_threshold_deg)) continue;
    const Vec3& a = mesh.positions()[e.a];
    const Vec3& b = mesh.positions()[e.b];
    Vec3 normal = mesh.face_normal(e.faces[0]) + mesh.face_normal(e.faces[1]);
    normal = normal.squaredNorm() > 0.0 ? normal.normalized() : mesh.face_normal(e.faces[0]);
    total += (b - a).norm();
    sharp.push_back({a, b, normal});
    cumulative.push_back(total);
  }
  if (sharp.empty() || !(total > 0.0)) throw Error(Errc::NoSharpEdges, "no edge deviates by more than the sharp angle");

  SurfaceSample out;
  out.seed = seed;
  out.points.reserve(n);
  out.normals.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng) * total);
    const std::size_t e = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), sharp.size() - 1);
    const double t = unit(rng);
    out.points.push_back(sharp[e].a + t * (sharp[e].b - sharp[e].a));
    out.normals.push_back(sharp[e].normal);
  }
  return out;
}

namespace {

double f1_sharp_with(const TriangleMesh& pred, const TriangleBVH& pred_bvh, const TriangleMesh& ref,
                     const TriangleBVH& ref_bvh, std::size_t n, double tau, std::uint64_t seed,
                     double angle_threshold_deg, int threads) {
  const SurfaceSample ref_sharp = sharp_edge_sample(ref, n, angle_threshold_deg, seed);
  const double precision = sample_to_surface(ref_sharp, pred_bvh, tau, threads).within_tau;
  double recall = 0.0;
  try {
    const SurfaceSample pred_sharp = sharp_edge_sample(pred, n, angle_threshold_deg, seed + 1);
    recall = sample_to_surface(pred_sharp, ref_bvh, tau, threads).within_tau;
  } catch (const Error& e) {
    if (e.code() != Errc::NoSharpEdges) throw;
  }
  return f1_from(precision, recall);
}

}  // namespace

double f1_sharp(const TriangleMesh& pred, const TriangleMesh& ref, std::size_t n, double tau, std::uint64_t seed,
                double angle_threshold_deg) {
  const TriangleBVH pred_bvh(pred);
  const TriangleBVH ref_bvh(ref);
  return f1_sharp_with(pred, pred_bvh, ref, ref_bvh, n, tau, seed, angle_threshold_deg, 0);
}

FidelityReport evaluate_meshes(const TriangleMesh& pred_in, const TriangleMesh& ref_in, const EvalOptions& options) {
  const auto [ref, transform] = normalize_to_unit_cube(ref_in, 0.0);
  const TriangleMesh pred = pred_in.transformed(transform);
  const TriangleBVH ref_bvh(ref);
  const TriangleBVH pred_bvh(pred);

  const SurfaceSample pred_samples = sample_surface(pred, options.n, options.seed);
  const SurfaceSample ref_samples = sample_surface(ref, options.n, options.seed + 1);
  if (options.n == 0) throw Error(Errc::EmptySample, "sample count must be positive");
  const OneWay forward = sample_to_surface(pred_samples, ref_bvh, options.tau, options.threads);
  const OneWay backward = sample_to_surface(ref_samples, pred_bvh, options.tau, options.threads);

  FidelityReport report;
  report.cd = (forward.mean_sq + backward.mean_sq) * 1e5;
  report.f1 = f1_from(forward.within_tau, backward.within_tau);
  report.anc = 0.5 * (forward.consistency + backward.consistency);
  report.tau = options.tau;
  report.n = options.n;
  report.seed = options.seed;
  if (options.sharp) {
    try {
      report.f1_sharp = f1_sharp_with(pred, pred_bvh, ref, ref_bvh, options.n, options.tau, options.seed + 2,
                                      kDefaultSharpAngleDeg, options.threads);
    } catch (const Error& e) {
      if (e.code() != Errc::NoSharpEdges) throw;
      report.note = "reference has no sharp edges; f1_sharp omitted";
    }
  }
  return report;
}

}  // namespace sharpdmc
