#pragma once

#include "sharpdmc/field.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sharpdmc {

/// Integer lattice coordinate; used for both grid corners and cells.
struct GridCoord {
  int i = 0, j = 0, k = 0;

  int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
  GridCoord offset(int di, int dj, int dk) const { return {i + di, j + dj, k + dk}; }
  GridCoord step(int axis, int delta = 1) const {
    return {i + (axis == 0) * delta, j + (axis == 1) * delta, k + (axis == 2) * delta};
  }
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
  friend auto operator<=>(const GridCoord&, const GridCoord&) = default;
};

inline bool is_valid_resolution(int r) {
  return r >= 32 && r <= 1024 && (r & (r - 1)) == 0;
}

/// Domain is [-1, 1]^3 split into R cells per axis.
struct GridFrame {
  int resolution = 0;

  double spacing() const { return 2.0 / resolution; }
  Vec3 corner_position(const GridCoord& c) const {
    const double h = spacing();
    return {-1.0 + c.i * h, -1.0 + c.j * h, -1.0 + c.k * h};
  }
};

/// Sparse boolean lattice stored as 8x8x8 bit bricks over a dense brick index.
class BrickBitset {
 public:
  static constexpr int kBrick = 8;

  explicit BrickBitset(int extent = 0);  // valid coordinates: [0, extent)

  int extent() const { return extent_; }
  bool test(const GridCoord& c) const;
  void set(const GridCoord& c);
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  /// Coordinates in (k, j, i) lexicographic order.
  std::vector<GridCoord> to_vector() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t b = 0; b < bricks_.size(); ++b) {
      const GridCoord base = brick_origin_[b];
      for (int z = 0; z < kBrick; ++z) {
        std::uint64_t word = bricks_[b][z];
        while (word) {
          const int bit = __builtin_ctzll(word);
          word &= word - 1;
          fn(GridCoord{base.i + (bit & 7), base.j + (bit >> 3), base.k + z});
        }
      }
    }
  }

  using Brick = std::array<std::uint64_t, kBrick>;
  const std::vector<Brick>& bricks() const { return bricks_; }
  const std::vector<GridCoord>& brick_origins() const { return brick_origin_; }

 private:
  std::size_t brick_slot(const GridCoord& c) const;
  Brick* brick_for(const GridCoord& c, bool create);
  const Brick* brick_for(const GridCoord& c) const;

  int extent_ = 0;
  int bricks_per_axis_ = 0;
  std::vector<std::int32_t> index_;
  std::vector<Brick> bricks_;
  std::vector<GridCoord> brick_origin_;
};

/// Cells whose box, grown by `dilation`, overlaps a triangle (separating-axis test).
using ActiveCellSet = BrickBitset;

/// Conservative voxelization of a normalized mesh at resolution R.
ActiveCellSet voxelize_active_cells(const TriangleMesh& mesh, int resolution, double dilation,
                                    int threads = 0);

/// Wall-clock seconds spent in each phase of classify_corners.
struct ClassifyTimings {
  double voxelization = 0.0;
  double distance = 0.0;
  double flood_fill = 0.0;
};

enum class CornerClass : std::uint8_t { Exterior, Interior, Band };

std::string_view corner_class_name(CornerClass c);

/// Corner classification for the whole (R+1)^3 lattice, stored sparsely:
/// band corners (corners of active cells) keep their margin; every other
/// corner is resolved through the flood-filled row runs.
class SparseCornerGrid {
 public:
  GridFrame frame() const { return frame_; }
  int resolution() const { return frame_.resolution; }
  double spacing() const { return frame_.spacing(); }

  bool in_range(const GridCoord& c) const {
    const int r = frame_.resolution;
    return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i <= r && c.j <= r && c.k <= r;
  }
  CornerClass classify(const GridCoord& c) const;
  bool occupied(const GridCoord& c) const;
  bool is_band(const GridCoord& c) const;
  /// Present for band corners (and for band corners reclassified as interior).
  std::optional<double> margin(const GridCoord& c) const;
  /// Band corner whose margin, in double precision, was >= 0.
  bool margin_nonnegative(const GridCoord& c) const;

  std::size_t band_corner_count() const { return band_count_; }
  std::size_t active_cell_count() const { return active_cell_count_; }
  bool leak_detected() const { return leak_detected_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// fn(coord, class, occupied, margin) for every band-bit corner, in brick order.
  template <typename Fn>
  void for_each_band(Fn&& fn) const {
    for (std::size_t b = 0; b < bricks_.size(); ++b) {
      const auto& brick = bricks_[b];
      const GridCoord base = brick_origin_[b];
      for (int z = 0; z < 8; ++z) {
        std::uint64_t word = brick.band[z];
        while (word) {
          const int bit = __builtin_ctzll(word);
          word &= word - 1;
          const int idx = bit + 64 * z;
          const GridCoord c{base.i + (bit & 7), base.j + (bit >> 3), base.k + z};
          fn(c, band_class(brick, idx), ((brick.occupied[z] >> bit) & 1) != 0,
             static_cast<double>(brick.margin[idx]));
        }
      }
    }
  }

  /// `i j k class g` per band corner.
  void write_debug_dump(std::ostream& out) const;

 private:
  friend SparseCornerGrid classify_corners(const TriangleMesh&, const LinfField&, int, int, ClassifyTimings*);

  struct CornerBrick {
    std::array<std::uint64_t, 8> band{};
    std::array<std::uint64_t, 8> nonnegative{};  // margin >= 0
    std::array<std::uint64_t, 8> occupied{};     // final occupancy
    std::array<float, 512> margin{};
  };
  struct Run {
    std::int32_t begin, end;  // inclusive i range
    bool exterior;
  };

  static CornerClass band_class(const CornerBrick& b, int idx) {
    const int z = idx >> 6, bit = idx & 63;
    if ((b.nonnegative[z] >> bit) & 1) return CornerClass::Band;
    return ((b.occupied[z] >> bit) & 1) ? CornerClass::Interior : CornerClass::Band;
  }
  const CornerBrick* brick_for(const GridCoord& c) const;
  const Run* run_for(const GridCoord& c) const;

  GridFrame frame_;
  int bricks_per_axis_ = 0;
  std::vector<std::int32_t> brick_index_;
  std::vector<CornerBrick> bricks_;
  std::vector<GridCoord> brick_origin_;
  std::vector<std::uint32_t> row_offsets_;  // row = k * (R + 1) + j
  std::vector<Run> runs_;
  std::size_t band_count_ = 0;
  std::size_t active_cell_count_ = 0;
  bool leak_detected_ = false;
  std::vector<std::string> warnings_;
};

/// Voxelize, evaluate margins on the band, then flood fill from the domain
/// boundary through every corner that is not an occupied band corner.
SparseCornerGrid classify_corners(const TriangleMesh& mesh, const LinfField& field, int resolution,
                                  int threads = 0, ClassifyTimings* timings = nullptr);

}  // namespace sharpdmc
