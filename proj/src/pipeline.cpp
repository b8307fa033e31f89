#include "sharpdmc/pipeline.hpp"

#include "sharpdmc/error.hpp"

#include <chrono>

namespace sharpdmc {

void RemeshConfig::validate() const {
  if (!is_valid_resolution(resolution)) {
    throw Error(Errc::ResolutionOutOfRange,
                "resolution " + std::to_string(resolution) + " is not a power of two in [32, 1024]");
  }
  if (!(epsilon_h > 0.0)) throw Error(Errc::InvalidConfig, "epsilon_h must be positive");
  if (bisect_iters < 1 || bisect_iters > 30) throw Error(Errc::InvalidConfig, "bisect_iters must be in [1, 30]");
  const double pad = effective_padding();
  if (!(pad > epsilon()) || !(pad < 1.0)) {
    throw Error(Errc::InvalidConfig, "padding must exceed epsilon and stay below 1");
  }
}

RemeshResult remesh(const TriangleMesh& source, const RemeshConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  RemeshResult result;
  auto [normalized, transform] = normalize_to_unit_cube(source, config.effective_padding());
  auto mesh = std::make_shared<const TriangleMesh>(std::move(normalized));
  auto bvh = std::make_shared<const TriangleBVH>(mesh);
  const LinfField field(bvh, config.epsilon(), config.mode);
  const double setup = std::chrono::duration<double>(Clock::now() - start).count();

  ClassifyTimings phases;
  const SparseCornerGrid grid = classify_corners(*mesh, field, config.resolution, config.threads, &phases);
  result.timings.voxelization = setup + phases.voxelization;
  result.timings.sdf = phases.distance;
  result.timings.flood_fill = phases.flood_fill;
  result.warnings = grid.warnings();
  result.band_corners = grid.band_corner_count();
  result.active_cells = grid.active_cell_count();

  const auto extract_start = Clock::now();
  ExtractConfig ec;
  ec.bisect_iters = config.bisect_iters;
  ec.refine = config.refine_enabled();
  ec.threads = config.threads;
  ec.transform = transform;
  result.dmc = extract(grid, field, ec);
  result.output = result.dmc.source_mesh();
  result.timings.extraction = std::chrono::duration<double>(Clock::now() - extract_start).count();
  return result;
}

}  // namespace sharpdmc
