#include "sharpdmc/voxelizer.hpp"

#include "sharpdmc/error.hpp"
#include "sharpdmc/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

namespace sharpdmc {

// ---------------------------------------------------------------------------
// BrickBitset

BrickBitset::BrickBitset(int extent)
    : extent_(extent), bricks_per_axis_((extent + kBrick - 1) / kBrick) {
  index_.assign(static_cast<std::size_t>(bricks_per_axis_) * bricks_per_axis_ * bricks_per_axis_, -1);
}

std::size_t BrickBitset::brick_slot(const GridCoord& c) const {
  const std::size_t n = static_cast<std::size_t>(bricks_per_axis_);
  return (static_cast<std::size_t>(c.k >> 3) * n + static_cast<std::size_t>(c.j >> 3)) * n +
         static_cast<std::size_t>(c.i >> 3);
}

BrickBitset::Brick* BrickBitset::brick_for(const GridCoord& c, bool create) {
  std::int32_t& slot = index_[brick_slot(c)];
  if (slot < 0) {
    if (!create) return nullptr;
    slot = static_cast<std::int32_t>(bricks_.size());
    bricks_.push_back({});
    brick_origin_.push_back({c.i & ~7, c.j & ~7, c.k & ~7});
  }
  return &bricks_[static_cast<std::size_t>(slot)];
}

const BrickBitset::Brick* BrickBitset::brick_for(const GridCoord& c) const {
  const std::int32_t slot = index_[brick_slot(c)];
  return slot < 0 ? nullptr : &bricks_[static_cast<std::size_t>(slot)];
}

bool BrickBitset::test(const GridCoord& c) const {
  if (c.i < 0 || c.j < 0 || c.k < 0 || c.i >= extent_ || c.j >= extent_ || c.k >= extent_) return false;
  const Brick* b = brick_for(c);
  return b && (((*b)[c.k & 7] >> ((c.i & 7) + 8 * (c.j & 7))) & 1);
}

void BrickBitset::set(const GridCoord& c) {
  Brick* b = brick_for(c, true);
  (*b)[c.k & 7] |= std::uint64_t{1} << ((c.i & 7) + 8 * (c.j & 7));
}

std::size_t BrickBitset::count() const {
  std::size_t n = 0;
  for (const auto& b : bricks_) {
    for (auto w : b) n += static_cast<std::size_t>(__builtin_popcountll(w));
  }
  return n;
}

std::vector<GridCoord> BrickBitset::to_vector() const {
  std::vector<GridCoord> out;
  out.reserve(count());
  for_each([&](const GridCoord& c) { out.push_back(c); });
  std::sort(out.begin(), out.end(), [](const GridCoord& a, const GridCoord& b) {
    return std::tie(a.k, a.j, a.i) < std::tie(b.k, b.j, b.i);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Voxelization

ActiveCellSet voxelize_active_cells(const TriangleMesh& mesh, int resolution, double dilation,
                                    int threads) {
  if (!is_valid_resolution(resolution)) {
    throw Error(Errc::ResolutionOutOfRange,
                "resolution " + std::to_string(resolution) + " is not a power of two in [32, 1024]");
  }
  const GridFrame frame{resolution};
  const double h = frame.spacing();
  const Vec3 half = Vec3::Constant(0.5 * h + dilation);
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>(std::floor((x + 1.0) / h)), 0, resolution - 1);
  };

  const std::size_t n = mesh.triangle_count();
  const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(n)));
  std::vector<ActiveCellSet> partial(static_cast<std::size_t>(workers), ActiveCellSet(resolution));
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      ActiveCellSet& out = partial[w];
      for (std::size_t t = n * w / workers; t < n * (w + 1) / workers; ++t) {
        const Vec3& a = mesh.corner(t, 0);
        const Vec3& b = mesh.corner(t, 1);
        const Vec3& c = mesh.corner(t, 2);
        const Vec3 lo = a.cwiseMin(b).cwiseMin(c).array() - dilation;
        const Vec3 hi = a.cwiseMax(b).cwiseMax(c).array() + dilation;
        const int i0 = cell_of(lo[0]), i1 = cell_of(hi[0]);
        const int j0 = cell_of(lo[1]), j1 = cell_of(hi[1]);
        const int k0 = cell_of(lo[2]), k1 = cell_of(hi[2]);
        for (int k = k0; k <= k1; ++k) {
          for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
              const GridCoord cell{i, j, k};
              if (out.test(cell)) continue;
              const Vec3 center = frame.corner_position(cell) + Vec3::Constant(0.5 * h);
              if (triangle_box_overlap(center, half, a, b, c)) out.set(cell);
            }
          }
        }
      }
    }
  });

  // Merge in canonical (k, j, i) brick order so iteration order is independent
  // of the worker count.
  std::vector<std::pair<GridCoord, const BrickBitset::Brick*>> all;
  for (const auto& part : partial) {
    for (std::size_t b = 0; b < part.bricks().size(); ++b) {
      all.push_back({part.brick_origins()[b], &part.bricks()[b]});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return std::tie(x.first.k, x.first.j, x.first.i) < std::tie(y.first.k, y.first.j, y.first.i);
  });
  ActiveCellSet merged(resolution);
  for (const auto& [origin, brick] : all) {
    for (int z = 0; z < 8; ++z) {
      std::uint64_t word = (*brick)[z];
      while (word) {
        const int bit = __builtin_ctzll(word);
        word &= word - 1;
        merged.set({origin.i + (bit & 7), origin.j + (bit >> 3), origin.k + z});
      }
    }
  }
  return merged;
}

// ---------------------------------------------------------------------------
// SparseCornerGrid

std::string_view corner_class_name(CornerClass c) {
  switch (c) {
    case CornerClass::Exterior: return "EXTERIOR";
    case CornerClass::Interior: return "INTERIOR";
    case CornerClass::Band: return "BAND";
  }
  return "?";
}

const SparseCornerGrid::CornerBrick* SparseCornerGrid::brick_for(const GridCoord& c) const {
  const std::size_t n = static_cast<std::size_t>(bricks_per_axis_);
  const std::int32_t slot =
      brick_index_[(static_cast<std::size_t>(c.k >> 3) * n + static_cast<std::size_t>(c.j >> 3)) * n +
                   static_cast<std::size_t>(c.i >> 3)];
  return slot < 0 ? nullptr : &bricks_[static_cast<std::size_t>(slot)];
}

const SparseCornerGrid::Run* SparseCornerGrid::run_for(const GridCoord& c) const {
  const std::size_t row = static_cast<std::size_t>(c.k) * (frame_.resolution + 1) + c.j;
  const Run* first = runs_.data() + row_offsets_[row];
  const Run* last = runs_.data() + row_offsets_[row + 1];
  const Run* it = std::upper_bound(first, last, c.i, [](int i, const Run& r) { return i < r.begin; });
  if (it == first) return nullptr;
  --it;
  return it->end >= c.i ? it : nullptr;
}

bool SparseCornerGrid::is_band(const GridCoord& c) const {
  if (!in_range(c)) return false;
  const CornerBrick* b = brick_for(c);
  const int bit = (c.i & 7) + 8 * (c.j & 7);
  return b && ((b->band[c.k & 7] >> bit) & 1);
}

CornerClass SparseCornerGrid::classify(const GridCoord& c) const {
  if (!in_range(c)) return CornerClass::Exterior;
  const CornerBrick* b = brick_for(c);
  const int bit = (c.i & 7) + 8 * (c.j & 7);
  if (b && ((b->band[c.k & 7] >> bit) & 1)) return band_class(*b, bit + 64 * (c.k & 7));
  const Run* run = run_for(c);
  return (run == nullptr || run->exterior) ? CornerClass::Exterior : CornerClass::Interior;
}

bool SparseCornerGrid::occupied(const GridCoord& c) const {
  if (!in_range(c)) return false;
  const CornerBrick* b = brick_for(c);
  const int bit = (c.i & 7) + 8 * (c.j & 7);
  if (b && ((b->band[c.k & 7] >> bit) & 1)) return (b->occupied[c.k & 7] >> bit) & 1;
  const Run* run = run_for(c);
  return run != nullptr && !run->exterior;
}

std::optional<double> SparseCornerGrid::margin(const GridCoord& c) const {
  if (!in_range(c)) return std::nullopt;
  const CornerBrick* b = brick_for(c);
  const int bit = (c.i & 7) + 8 * (c.j & 7);
  if (b && ((b->band[c.k & 7] >> bit) & 1)) return static_cast<double>(b->margin[bit + 64 * (c.k & 7)]);
  return std::nullopt;
}

bool SparseCornerGrid::margin_nonnegative(const GridCoord& c) const {
  if (!in_range(c)) return false;
  const CornerBrick* b = brick_for(c);
  const int bit = (c.i & 7) + 8 * (c.j & 7);
  return b && ((b->nonnegative[c.k & 7] >> bit) & 1);
}

void SparseCornerGrid::write_debug_dump(std::ostream& out) const {
  for_each_band([&](const GridCoord& c, CornerClass cls, bool, double g) {
    out << c.i << ' ' << c.j << ' ' << c.k << ' ' << corner_class_name(cls) << ' ' << g << '\n';
  });
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller id is the root, sentinel 0 stays root
  }
};

}  // namespace

SparseCornerGrid classify_corners(const TriangleMesh& mesh, const LinfField& field, int resolution,
                                  int threads, ClassifyTimings* timings) {
  using Clock = std::chrono::steady_clock;
  auto lap = [last = Clock::now()]() mutable {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - last).count();
    last = now;
    return s;
  };
  ClassifyTimings local;
  if (timings == nullptr) timings = &local;
  const ActiveCellSet active = voxelize_active_cells(mesh, resolution, field.reach(), threads);

  SparseCornerGrid grid;
  grid.frame_ = GridFrame{resolution};
  grid.active_cell_count_ = active.count();
  const int r = resolution;
  const int corners = r + 1;
  grid.bricks_per_axis_ = (corners + 7) / 8;
  const std::size_t bpa = static_cast<std::size_t>(grid.bricks_per_axis_);
  grid.brick_index_.assign(bpa * bpa * bpa, -1);

  // Band corners: every corner of an active cell. Bricks are created in the
  // canonical order of the active set, then sorted.
  auto slot_of = [&](int bi, int bj, int bk) {
    return (static_cast<std::size_t>(bk) * bpa + static_cast<std::size_t>(bj)) * bpa +
           static_cast<std::size_t>(bi);
  };
  auto corner_brick = [&](int bi, int bj, int bk) -> SparseCornerGrid::CornerBrick& {
    std::int32_t& slot = grid.brick_index_[slot_of(bi, bj, bk)];
    if (slot < 0) {
      slot = static_cast<std::int32_t>(grid.bricks_.size());
      grid.bricks_.emplace_back();
      grid.brick_origin_.push_back({bi * 8, bj * 8, bk * 8});
    }
    return grid.bricks_[static_cast<std::size_t>(slot)];
  };
  for (std::size_t cb = 0; cb < active.bricks().size(); ++cb) {
    const GridCoord origin = active.brick_origins()[cb];
    const auto& cells = active.bricks()[cb];
    for (int z = 0; z < 8; ++z) {
      std::uint64_t word = cells[z];
      while (word) {
        const int bit = __builtin_ctzll(word);
        word &= word - 1;
        const GridCoord cell{origin.i + (bit & 7), origin.j + (bit >> 3), origin.k + z};
        for (int d = 0; d < 8; ++d) {
          const GridCoord c = cell.offset(d & 1, (d >> 1) & 1, (d >> 2) & 1);
          auto& brick = corner_brick(c.i >> 3, c.j >> 3, c.k >> 3);
          brick.band[c.k & 7] |= std::uint64_t{1} << ((c.i & 7) + 8 * (c.j & 7));
        }
      }
    }
  }
  {
    std::vector<std::size_t> perm(grid.bricks_.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = grid.brick_origin_[a];
      const auto& y = grid.brick_origin_[b];
      return std::tie(x.k, x.j, x.i) < std::tie(y.k, y.j, y.i);
    });
    std::vector<SparseCornerGrid::CornerBrick> bricks;
    std::vector<GridCoord> origins;
    bricks.reserve(perm.size());
    origins.reserve(perm.size());
    for (auto p : perm) {
      bricks.push_back(grid.bricks_[p]);
      origins.push_back(grid.brick_origin_[p]);
    }
    grid.bricks_ = std::move(bricks);
    grid.brick_origin_ = std::move(origins);
    for (std::size_t b = 0; b < grid.bricks_.size(); ++b) {
      const auto& o = grid.brick_origin_[b];
      grid.brick_index_[slot_of(o.i >> 3, o.j >> 3, o.k >> 3)] = static_cast<std::int32_t>(b);
    }
  }

  timings->voxelization = lap();

  // Margins on every band corner.
  const double epsilon = field.epsilon();
  parallel_for(grid.bricks_.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      auto& brick = grid.bricks_[b];
      const GridCoord base = grid.brick_origin_[b];
      std::uint32_t hint = ~0u;
      for (int z = 0; z < 8; ++z) {
        std::uint64_t word = brick.band[z];
        while (word) {
          const int bit = __builtin_ctzll(word);
          word &= word - 1;
          const GridCoord c{base.i + (bit & 7), base.j + (bit >> 3), base.k + z};
          const FieldSample s = field.sample(grid.frame_.corner_position(c), hint);
          hint = s.hit.triangle_id;
          const double g = epsilon - s.envelope;
          brick.margin[static_cast<std::size_t>(bit + 64 * z)] = static_cast<float>(g);
          if (g >= 0.0) brick.nonnegative[z] |= std::uint64_t{1} << bit;
        }
      }
    }
  });
  for (const auto& brick : grid.bricks_) {
    for (auto w : brick.band) grid.band_count_ += static_cast<std::size_t>(__builtin_popcountll(w));
  }

  timings->distance = lap();

  // Blocked intervals per row: maximal i-ranges of corners with margin >= 0.
  struct Interval {
    std::uint32_t row;
    std::int32_t begin, end;
  };
  std::vector<Interval> blocked;
  for (std::size_t b = 0; b < grid.bricks_.size(); ++b) {
    const auto& brick = grid.bricks_[b];
    const GridCoord base = grid.brick_origin_[b];
    for (int z = 0; z < 8; ++z) {
      for (int y = 0; y < 8; ++y) {
        unsigned bits = static_cast<unsigned>((brick.nonnegative[z] >> (8 * y)) & 0xFF);
        while (bits) {
          const int x0 = __builtin_ctz(bits);
          int x1 = x0;
          while (x1 + 1 < 8 && ((bits >> (x1 + 1)) & 1)) ++x1;
          bits &= ~(((1u << (x1 + 1)) - 1u));
          const auto row = static_cast<std::uint32_t>((base.k + z) * corners + base.j + y);
          blocked.push_back({row, base.i + x0, base.i + x1});
        }
      }
    }
  }
  std::sort(blocked.begin(), blocked.end(), [](const Interval& a, const Interval& b) {
    return a.row != b.row ? a.row < b.row : a.begin < b.begin;
  });

  const std::size_t rows = static_cast<std::size_t>(corners) * corners;
  grid.row_offsets_.assign(rows + 1, 0);
  grid.runs_.clear();
  grid.runs_.reserve(rows + blocked.size());
  {
    std::size_t cursor = 0;
    for (std::size_t row = 0; row < rows; ++row) {
      grid.row_offsets_[row] = static_cast<std::uint32_t>(grid.runs_.size());
      std::int32_t next_free = 0;
      while (cursor < blocked.size() && blocked[cursor].row == row) {
        const Interval& iv = blocked[cursor++];
        if (iv.begin > next_free) grid.runs_.push_back({next_free, iv.begin - 1, false});
        next_free = std::max(next_free, iv.end + 1);
      }
      if (next_free <= r) grid.runs_.push_back({next_free, r, false});
    }
    grid.row_offsets_[rows] = static_cast<std::uint32_t>(grid.runs_.size());
  }

  // Flood fill: union-find over runs, 6-connectivity realized as run overlap
  // between rows adjacent in j or k. Node 0 is the exterior sentinel.
  UnionFind uf(grid.runs_.size() + 1);
  auto link_rows = [&](std::size_t ra, std::size_t rb) {
    std::uint32_t a = grid.row_offsets_[ra], a_end = grid.row_offsets_[ra + 1];
    std::uint32_t b = grid.row_offsets_[rb], b_end = grid.row_offsets_[rb + 1];
    while (a < a_end && b < b_end) {
      const auto& x = grid.runs_[a];
      const auto& y = grid.runs_[b];
      if (x.begin <= y.end && y.begin <= x.end) uf.unite(a + 1, b + 1);
      if (x.end < y.end) ++a;
      else ++b;
    }
  };
  for (int k = 0; k < corners; ++k) {
    for (int j = 0; j < corners; ++j) {
      const std::size_t row = static_cast<std::size_t>(k) * corners + j;
      const bool boundary_row = j == 0 || j == r || k == 0 || k == r;
      for (std::uint32_t q = grid.row_offsets_[row]; q < grid.row_offsets_[row + 1]; ++q) {
        const auto& run = grid.runs_[q];
        if (boundary_row || run.begin == 0 || run.end == r) uf.unite(0, q + 1);
      }
      if (j < r) link_rows(row, row + 1);
      if (k < r) link_rows(row, row + corners);
    }
  }
  for (std::size_t q = 0; q < grid.runs_.size(); ++q) {
    grid.runs_[q].exterior = uf.find(static_cast<std::uint32_t>(q + 1)) == 0;
  }

  // Final occupancy of band corners: margin >= 0, or unreachable from outside.
  parallel_for(grid.bricks_.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      auto& brick = grid.bricks_[b];
      const GridCoord base = grid.brick_origin_[b];
      for (int z = 0; z < 8; ++z) {
        std::uint64_t occ = brick.nonnegative[z];
        std::uint64_t rest = brick.band[z] & ~brick.nonnegative[z];
        while (rest) {
          const int bit = __builtin_ctzll(rest);
          rest &= rest - 1;
          const auto* run = grid.run_for({base.i + (bit & 7), base.j + (bit >> 3), base.k + z});
          if (run == nullptr || !run->exterior) occ |= std::uint64_t{1} << bit;
        }
        brick.occupied[z] = occ;
      }
    }
  });

  timings->flood_fill = lap();

  // Leak diagnostic: for closed inputs, exterior corners must test outside
  // by ray parity. Checks a deterministic sample of exterior runs near the band.
  const TopologyReport topo = check_watertight_manifold(mesh);
  if (topo.closed && topo.edge_manifold) {
    std::vector<std::pair<std::size_t, std::uint32_t>> candidates;  // (row, run)
    for (std::size_t row = 0; row < rows; ++row) {
      const std::uint32_t a = grid.row_offsets_[row], e = grid.row_offsets_[row + 1];
      for (std::uint32_t q = a; q < e; ++q) {
        if (grid.runs_[q].exterior) candidates.push_back({row, q});
      }
    }
    const std::size_t samples = std::min<std::size_t>(64, candidates.size());
    for (std::size_t s = 0; s < samples && !grid.leak_detected_; ++s) {
      const auto [row, q] = candidates[s * candidates.size() / samples];
      const auto& run = grid.runs_[q];
      const GridCoord c{(run.begin + run.end) / 2, static_cast<int>(row % corners),
                        static_cast<int>(row / corners)};
      const Vec3 p = grid.frame_.corner_position(c);
      if (field.bvh().nearest_point(p).distance > 0.25 * grid.spacing() && ray_parity_inside(mesh, p)) {
        grid.leak_detected_ = true;
        grid.warnings_.push_back("LeakDetected: exterior flood fill reached corner (" +
                                 std::to_string(c.i) + ", " + std::to_string(c.j) + ", " +
                                 std::to_string(c.k) + ") inside the closed input; epsilon may be too small");
      }
    }
  }
  return grid;
}

}  // namespace sharpdmc
