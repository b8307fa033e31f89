#pragma once

#include "sharpdmc/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sharpdmc {

struct SurfaceSample {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // unit, one per point
  std::uint64_t seed = 0;

  std::size_t count() const { return points.size(); }
};

/// Area-weighted uniform samples with face normals. Deterministic per seed.
SurfaceSample sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Static 3-d tree over a point set for exact nearest-neighbor queries.
class PointKdTree {
 public:
  explicit PointKdTree(std::vector<Vec3> points);

  /// Index of the nearest point (lowest index on ties) and its squared distance.
  std::pair<std::size_t, double> nearest(const Vec3& q) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::uint32_t point;
    std::int32_t left = -1, right = -1;
    int axis = 0;
  };
  std::int32_t build(std::vector<std::uint32_t>& ids, std::size_t lo, std::size_t hi, int depth);

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

struct FidelityReport {
  double cd = 0.0;  // sum of both mean squared distances, times 1e5
  double f1 = 0.0;
  std::optional<double> f1_sharp;
  double anc = 0.0;
  double tau = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string note;  // e.g. why f1_sharp is absent

  /// `key=value` pairs on one line.
  std::string to_text() const;
  /// One JSON object on one line.
  std::string to_json() const;
};

/// Sample-to-sample metrics: nearest neighbors in the other sample.
FidelityReport evaluate_pair(const SurfaceSample& pred, const SurfaceSample& ref, double tau);

inline constexpr double kDefaultSharpAngleDeg = 30.0;

/// Samples along interior edges whose face normals deviate by more than
/// `angle_threshold_deg`, length-weighted; normals average the two faces.
/// Throws NoSharpEdges when no edge qualifies.
SurfaceSample sharp_edge_sample(const TriangleMesh& mesh, std::size_t n,
                                double angle_threshold_deg, std::uint64_t seed);

/// F1 on sharp-edge samples: reference crease samples matched by the
/// predicted surface (precision) and predicted crease samples matched by the
/// reference surface (recall). A prediction without creases scores 0.
double f1_sharp(const TriangleMesh& pred, const TriangleMesh& ref, std::size_t n, double tau,
                std::uint64_t seed, double angle_threshold_deg = kDefaultSharpAngleDeg);

struct EvalOptions {
  std::size_t n = 100000;
  double tau = 0.005;
  std::uint64_t seed = 0;
  bool sharp = true;
  int threads = 0;
};

/// Mesh-level evaluation. Both meshes are mapped by the transform that takes
/// the reference's bounding box onto [-1, 1] (longest axis), so tau is in those
/// units. Distances are from samples to the other mesh's surface.
FidelityReport evaluate_meshes(const TriangleMesh& pred, const TriangleMesh& ref, const EvalOptions& options);

}  // namespace sharpdmc
