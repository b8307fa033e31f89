#pragma once

#include "sharpdmc/dmc.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sharpdmc {

struct RemeshConfig {
  int resolution = 256;
  double epsilon_h = 1.5;  // offset distance in grid spacings
  int bisect_iters = 12;
  /// Tangent-plane vertex placement. Unset means on below R = 512.
  std::optional<bool> refine;
  DistanceMode mode = DistanceMode::Linf;
  int threads = 0;
  std::uint64_t seed = 0;
  /// Normalization margin in normalized units. Unset means
  /// (envelope cap * epsilon_h + 2) * h, which keeps the outermost cells
  /// out of the narrow band.
  std::optional<double> padding;

  double spacing() const { return 2.0 / resolution; }
  double epsilon() const { return epsilon_h * spacing(); }
  bool refine_enabled() const { return refine.value_or(resolution < 512); }
  double effective_padding() const {
    return padding.value_or((kDefaultEnvelopeCap * epsilon_h + 2.0) * spacing());
  }
  /// Throws ResolutionOutOfRange or InvalidConfig.
  void validate() const;
};

struct StageTimings {
  double voxelization = 0.0;
  double flood_fill = 0.0;
  double sdf = 0.0;
  double extraction = 0.0;
  double compression = 0.0;

  double total() const { return voxelization + flood_fill + sdf + extraction + compression; }
};

struct RemeshResult {
  DMCMesh dmc;
  TriangleMesh output;  // source units
  StageTimings timings;
  std::vector<std::string> warnings;
  std::size_t band_corners = 0;
  std::size_t active_cells = 0;
};

/// Normalize, classify corners, extract. Output is independent of `threads`.
RemeshResult remesh(const TriangleMesh& source, const RemeshConfig& config);

}  // namespace sharpdmc
