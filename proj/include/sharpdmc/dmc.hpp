#pragma once

#include "sharpdmc/case_table.hpp"
#include "sharpdmc/voxelizer.hpp"

#include <span>

namespace sharpdmc {

/// 30-bit Morton code of a cell (10 bits per axis, x in the lowest bit).
std::uint32_t morton_code(const GridCoord& cell);

/// Primal grid edge from `start` to `start + unit(axis)`.
struct GridEdge {
  GridCoord start;
  int axis = 0;

  GridCoord end() const { return start.step(axis); }
  friend bool operator==(const GridEdge&, const GridEdge&) = default;
};

/// (axis, i, j, k) lexicographic.
bool canonical_less(const GridEdge& a, const GridEdge& b);

/// Per-voxel record of a DMC mesh: which corners are occupied, one dual vertex
/// per crossing component (in-cell offsets in [0,1)^3), and the triangulation
/// bits of the three edges the voxel owns (bit = axis of the edge leaving the
/// voxel's minimum corner).
struct VoxelRecord {
  GridCoord cell;
  std::uint8_t occupancy = 0;
  std::uint8_t vertex_count = 0;
  std::uint8_t tri_bits = 0;
  std::array<Vec3, 4> offsets{};

  friend bool operator==(const VoxelRecord& a, const VoxelRecord& b) {
    if (a.cell != b.cell || a.occupancy != b.occupancy || a.vertex_count != b.vertex_count ||
        a.tri_bits != b.tri_bits) {
      return false;
    }
    for (int v = 0; v < a.vertex_count; ++v) {
      if (a.offsets[v] != b.offsets[v]) return false;
    }
    return true;
  }
};

struct DMCMesh {
  int resolution = 0;
  std::vector<VoxelRecord> records;  // ascending Morton order of `cell`
  TriangleMesh assembled;            // normalized coordinates
  NormalizationTransform transform;  // source -> normalized

  /// Assembled mesh mapped back to source units.
  TriangleMesh source_mesh() const { return assembled.transformed(transform.inverse()); }
};

struct ExtractConfig {
  int bisect_iters = 12;
  bool refine = false;
  int threads = 0;
  NormalizationTransform transform;
};

/// Edges whose endpoint occupancies differ, in canonical order.
std::vector<GridEdge> find_crossing_edges(const SparseCornerGrid& grid);

/// Bisects the occupancy margin along an edge. Returns a point strictly inside
/// the edge, within h * 2^-iters of the sign change. Throws NoSignChange when
/// the margin does not change sign between the occupied and free endpoint.
Vec3 bisect_crossing(const GridFrame& frame, const GridEdge& edge, bool start_occupied,
                     const LinfField& field, int iters);

/// Dual vertex of one crossing component, returned as an in-cell offset in
/// [0,1)^3. Plain mode averages the crossings. Refined mode minimizes the
/// squared distance to the tangent planes at the crossings (normals from the
/// field gradient), truncating weak directions back to the average.
Vec3 place_vertex(const GridFrame& frame, const GridCoord& cell, std::span<const Vec3> crossings,
                  const LinfField& field, bool refine);

/// Full extraction: crossing edges, bisection, vertex placement, quads and
/// their triangulation. Checkerboard faces are first removed by marking one
/// free corner per such face occupied (the one with the largest margin), so
/// every face carries at most one surface segment and the output is
/// edge-manifold.
DMCMesh extract(const SparseCornerGrid& grid, const LinfField& field, const ExtractConfig& config = {});

/// Topology-only extraction from an explicit occupied corner set: crossings at
/// edge midpoints, vertices at component centroids.
DMCMesh extract_occupancy(std::span<const GridCoord> occupied, int resolution);

/// Rebuilds the triangle mesh from canonical records. Connectivity comes only
/// from occupancy bytes and grid adjacency; triangulation follows tri_bits
/// unless `choose_diagonals` is set, in which case the shorter diagonal is
/// picked and written back into the records.
TriangleMesh assemble_records(std::span<VoxelRecord> records, int resolution,
                              const NormalizationTransform& transform, bool choose_diagonals);

/// Throws InconsistentRecords when two records disagree on a shared corner or
/// a crossing edge lacks one of its four cells.
void validate_records(std::span<const VoxelRecord> records, int resolution);

}  // namespace sharpdmc
