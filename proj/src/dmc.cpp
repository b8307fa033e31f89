#include "sharpdmc/dmc.hpp"

#include "sharpdmc/error.hpp"
#include "sharpdmc/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <optional>
#include <unordered_set>

namespace sharpdmc {

namespace {

std::uint32_t spread_bits(std::uint32_t v) {
  v &= 0x3ff;
  v = (v | (v << 16)) & 0x030000ff;
  v = (v | (v << 8)) & 0x0300f00f;
  v = (v | (v << 4)) & 0x030c30c3;
  v = (v | (v << 2)) & 0x09249249;
  return v;
}

std::uint32_t compact_bits(std::uint32_t v) {
  v &= 0x09249249;
  v = (v | (v >> 2)) & 0x030c30c3;
  v = (v | (v >> 4)) & 0x0300f00f;
  v = (v | (v >> 8)) & 0x030000ff;
  v = (v | (v >> 16)) & 0x000003ff;
  return v;
}

GridCoord morton_decode(std::uint32_t code) {
  return {static_cast<int>(compact_bits(code)), static_cast<int>(compact_bits(code >> 1)),
          static_cast<int>(compact_bits(code >> 2))};
}

std::uint64_t corner_key(const GridCoord& c) {
  return static_cast<std::uint64_t>(c.i) | (static_cast<std::uint64_t>(c.j) << 21) |
         (static_cast<std::uint64_t>(c.k) << 42);
}

/// Increasing in canonical edge order, so a canonically sorted edge list has
/// sorted keys.
std::uint64_t edge_key(const GridEdge& e) {
  return (static_cast<std::uint64_t>(e.axis) << 33) | (static_cast<std::uint64_t>(e.start.i) << 22) |
         (static_cast<std::uint64_t>(e.start.j) << 11) | static_cast<std::uint64_t>(e.start.k);
}

bool cell_in_grid(const GridCoord& c, int resolution) {
  return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < resolution && c.j < resolution && c.k < resolution;
}

/// Cells around an edge in counter-clockwise order seen from +axis.
std::array<GridCoord, 4> cells_around(const GridEdge& e) {
  static constexpr int du[4] = {-1, 0, 0, -1};
  static constexpr int dv[4] = {-1, -1, 0, 0};
  std::array<GridCoord, 4> out;
  for (int q = 0; q < 4; ++q) {
    // (u, v) = (y, z) for x edges, (z, x) for y edges, (x, y) for z edges.
    switch (e.axis) {
      case 0: out[q] = e.start.offset(0, du[q], dv[q]); break;
      case 1: out[q] = e.start.offset(dv[q], 0, du[q]); break;
      default: out[q] = e.start.offset(du[q], dv[q], 0); break;
    }
  }
  return out;
}

/// Local edge index of global edge `e` inside `cell`, which must contain it.
int local_edge(const GridEdge& e, const GridCoord& cell) {
  const int dx = e.start.i - cell.i, dy = e.start.j - cell.j, dz = e.start.k - cell.k;
  switch (e.axis) {
    case 0: return 0 + dy + 2 * dz;
    case 1: return 4 + dx + 2 * dz;
    default: return 8 + dx + 2 * dy;
  }
}

GridCoord local_corner(const GridCoord& cell, int c) {
  return cell.offset(c & 1, (c >> 1) & 1, (c >> 2) & 1);
}

template <typename Occ>
std::uint8_t occupancy_byte(const GridCoord& cell, const Occ& occ) {
  std::uint8_t byte = 0;
  for (int c = 0; c < 8; ++c) {
    if (occ(local_corner(cell, c))) byte |= static_cast<std::uint8_t>(1u << c);
  }
  return byte;
}

/// Free corners of the first checkerboard face of `byte`, if any.
std::optional<std::array<int, 2>> ambiguous_face_free_corners(std::uint8_t byte) {
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      int corners[4];
      int n = 0;
      for (int c = 0; c < 8; ++c) {
        if (((c >> axis) & 1) == side) corners[n++] = c;
      }
      const int a = (byte >> corners[0]) & 1, b = (byte >> corners[1]) & 1;
      const int c = (byte >> corners[2]) & 1, d = (byte >> corners[3]) & 1;
      if (a == d && b == c && a != b) {
        return a ? std::array<int, 2>{corners[1], corners[2]} : std::array<int, 2>{corners[0], corners[3]};
      }
    }
  }
  return std::nullopt;
}

/// Base occupancy plus corners forced occupied by checkerboard removal.
template <typename Base>
struct Overlay {
  Base base;
  std::unordered_set<std::uint64_t> forced;
  std::vector<GridCoord> forced_list;

  bool operator()(const GridCoord& c) const {
    if (base(c)) return true;
    return !forced.empty() && forced.count(corner_key(c)) != 0;
  }
};

struct GridOccupancy {
  const SparseCornerGrid* grid;
  bool operator()(const GridCoord& c) const { return grid->occupied(c); }
};

struct SetOccupancy {
  const std::unordered_set<std::uint64_t>* set;
  bool operator()(const GridCoord& c) const { return set->count(corner_key(c)) != 0; }
};

/// Sorted, unique Morton codes of the in-grid cells around `edges`.
std::vector<std::uint32_t> cells_touching(const std::vector<GridEdge>& edges, int resolution) {
  std::vector<std::uint32_t> codes;
  codes.reserve(edges.size() * 4);
  for (const auto& e : edges) {
    for (const auto& c : cells_around(e)) {
      if (cell_in_grid(c, resolution)) codes.push_back(morton_code(c));
    }
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return codes;
}

/// Marks free corners occupied until no cell on the surface has a
/// checkerboard face. Of the two free corners of such a face, the one with
/// the larger `priority` wins; ties go to the smaller coordinate.
template <typename Base, typename Priority>
void remove_checkerboards(Overlay<Base>& occ, std::vector<std::uint32_t> pending, int resolution,
                          const Priority& priority) {
  while (!pending.empty()) {
    std::vector<std::uint32_t> touched;
    for (const std::uint32_t code : pending) {
      const GridCoord cell = morton_decode(code);
      for (;;) {
        const auto free = ambiguous_face_free_corners(occupancy_byte(cell, occ));
        if (!free) break;
        const GridCoord a = local_corner(cell, (*free)[0]);
        const GridCoord b = local_corner(cell, (*free)[1]);
        const double pa = priority(a), pb = priority(b);
        const bool take_b = pb > pa || (pb == pa && std::tie(b.k, b.j, b.i) < std::tie(a.k, a.j, a.i));
        const GridCoord chosen = take_b ? b : a;
        occ.forced.insert(corner_key(chosen));
        occ.forced_list.push_back(chosen);
        for (int d = 0; d < 8; ++d) {
          const GridCoord nb = chosen.offset(-(d & 1), -((d >> 1) & 1), -((d >> 2) & 1));
          if (cell_in_grid(nb, resolution) && nb != cell) touched.push_back(morton_code(nb));
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    pending = std::move(touched);
  }
}

template <typename Occ>
std::vector<GridEdge> crossing_edges_from(const std::vector<GridCoord>& occupied_candidates, const Occ& occ) {
  std::vector<GridEdge> edges;
  for (const auto& c : occupied_candidates) {
    for (int axis = 0; axis < 3; ++axis) {
      if (!occ(c.step(axis, 1))) edges.push_back({c, axis});
      const GridCoord down = c.step(axis, -1);
      if (!occ(down)) edges.push_back({down, axis});
    }
  }
  std::sort(edges.begin(), edges.end(), canonical_less);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

constexpr double kMaxOffset = 1.0 - 1.0 / (1u << 30);

Vec3 clamp_offset(const Vec3& local) {
  return local.cwiseMax(Vec3::Zero()).cwiseMin(Vec3::Constant(kMaxOffset));
}

/// Minimizer of the summed squared distances to the tangent planes, expanded
/// around the mass point. Eigen-directions weaker than 1% of the strongest are
/// dropped so flat or cylindrical patches stay at the mass point.
Vec3 tangent_plane_vertex(std::span<const Vec3> points, std::span<const Vec3> normals) {
  Vec3 mass = Vec3::Zero();
  for (const auto& x : points) mass += x;
  mass /= static_cast<double>(points.size());
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Vec3 atb = Vec3::Zero();
  for (std::size_t q = 0; q < points.size(); ++q) {
    const Vec3& n = normals[q];
    if (n.squaredNorm() == 0.0) continue;
    ata += n * n.transpose();
    atb += n * n.dot(points[q] - mass);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(ata);
  const Vec3 lambda = eig.eigenvalues();
  const double cutoff = 0.01 * lambda.maxCoeff();
  Vec3 delta = Vec3::Zero();
  for (int q = 0; q < 3; ++q) {
    if (lambda[q] <= cutoff || lambda[q] <= 0.0) continue;
    const Vec3 u = eig.eigenvectors().col(q);
    delta += u * (u.dot(atb) / lambda[q]);
  }
  return mass + delta;
}

Vec3 mass_point(std::span<const Vec3> points) {
  Vec3 mass = Vec3::Zero();
  for (const auto& x : points) mass += x;
  return mass / static_cast<double>(points.size());
}

struct Crossing {
  Vec3 point;
  Vec3 normal;
};

/// Shared back half of both extraction paths: records in Morton order, one
/// vertex per crossing component, then assembly.
template <typename Occ>
DMCMesh build_mesh(int resolution, const Occ& occ, const std::vector<GridEdge>& edges,
                   const std::vector<Crossing>& crossings, bool refine, int threads,
                   const NormalizationTransform& transform) {
  std::vector<std::uint64_t> keys(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) keys[e] = edge_key(edges[e]);
  const std::vector<std::uint32_t> codes = cells_touching(edges, resolution);

  DMCMesh out;
  out.resolution = resolution;
  out.transform = transform;
  out.records.resize(codes.size());
  const GridFrame frame{resolution};
  const double h = frame.spacing();
  parallel_for(codes.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Vec3> pts, normals;
    for (std::size_t r = begin; r < end; ++r) {
      VoxelRecord& rec = out.records[r];
      rec.cell = morton_decode(codes[r]);
      rec.occupancy = occupancy_byte(rec.cell, occ);
      const CellCase& cc = cell_case(rec.occupancy);
      rec.vertex_count = cc.component_count;
      const Vec3 origin = frame.corner_position(rec.cell);
      for (int comp = 0; comp < cc.component_count; ++comp) {
        pts.clear();
        normals.clear();
        for (int e = 0; e < 12; ++e) {
          if (cc.edge_component[e] != comp) continue;
          const GridEdge ge{local_corner(rec.cell, edge_corners(e).first), edge_axis(e)};
          const auto it = std::lower_bound(keys.begin(), keys.end(), edge_key(ge));
          const Crossing& x = crossings[static_cast<std::size_t>(it - keys.begin())];
          pts.push_back(x.point);
          normals.push_back(x.normal);
        }
        const Vec3 p = refine ? tangent_plane_vertex(pts, normals) : mass_point(pts);
        rec.offsets[comp] = clamp_offset((p - origin) / h);
      }
    }
  });
  out.assembled = assemble_records(out.records, resolution, transform, true);
  return out;
}

/// `signs_known` skips the endpoint evaluations when the caller already
/// knows the margin is >= 0 inside and < 0 outside.
std::optional<Crossing> try_bisect(const GridFrame& frame, const GridEdge& edge, bool start_occupied,
                                   const LinfField& field, int iters, bool signs_known = false) {
  const Vec3 a = frame.corner_position(edge.start);
  const Vec3 b = frame.corner_position(edge.end());
  const Vec3 inside = start_occupied ? a : b;
  const Vec3 outside = start_occupied ? b : a;
  const double eps = field.epsilon();
  std::uint32_t hint = ~0u;
  if (!signs_known) {
    const FieldSample si = field.sample(inside);
    const FieldSample so = field.sample(outside, si.hit.triangle_id);
    if (!(eps - si.envelope >= 0.0) || !(eps - so.envelope < 0.0)) return std::nullopt;
    hint = so.hit.triangle_id;
  }

  double lo = 0.0, hi = 1.0;  // parameter from inside to outside
  Vec3 normal = Vec3::Zero();
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const FieldSample s = field.sample(inside + mid * (outside - inside), hint);
    hint = s.hit.triangle_id;
    if (s.gradient.squaredNorm() > 0.0) normal = s.gradient;
    if (eps - s.envelope >= 0.0) lo = mid;
    else hi = mid;
  }
  const double step = std::ldexp(1.0, -iters);
  double t = std::clamp(0.5 * (lo + hi), step, 1.0 - step);
  if (!start_occupied) t = 1.0 - t;
  return Crossing{a + t * (b - a), normal};
}

}  // namespace

std::uint32_t morton_code(const GridCoord& cell) {
  return spread_bits(static_cast<std::uint32_t>(cell.i)) |
         (spread_bits(static_cast<std::uint32_t>(cell.j)) << 1) |
         (spread_bits(static_cast<std::uint32_t>(cell.k)) << 2);
}

bool canonical_less(const GridEdge& a, const GridEdge& b) {
  return std::tie(a.axis, a.start.i, a.start.j, a.start.k) < std::tie(b.axis, b.start.i, b.start.j, b.start.k);
}

std::vector<GridEdge> find_crossing_edges(const SparseCornerGrid& grid) {
  std::vector<GridCoord> occupied;
  grid.for_each_band([&](const GridCoord& c, CornerClass, bool occ, double) {
    if (occ) occupied.push_back(c);
  });
  return crossing_edges_from(occupied, GridOccupancy{&grid});
}

Vec3 bisect_crossing(const GridFrame& frame, const GridEdge& edge, bool start_occupied,
                     const LinfField& field, int iters) {
  if (iters < 1) throw Error(Errc::InvalidConfig, "bisection needs at least one iteration");
  auto x = try_bisect(frame, edge, start_occupied, field, iters);
  if (!x) throw Error(Errc::NoSignChange, "occupancy margin does not change sign along the edge");
  return x->point;
}

Vec3 place_vertex(const GridFrame& frame, const GridCoord& cell, std::span<const Vec3> crossings,
                  const LinfField& field, bool refine) {
  Vec3 p;
  if (refine) {
    std::vector<Vec3> normals;
    normals.reserve(crossings.size());
    for (const auto& x : crossings) normals.push_back(field.sample(x).gradient);
    p = tangent_plane_vertex(crossings, normals);
  } else {
    p = mass_point(crossings);
  }
  return clamp_offset((p - frame.corner_position(cell)) / frame.spacing());
}

DMCMesh extract(const SparseCornerGrid& grid, const LinfField& field, const ExtractConfig& config) {
  const int r = grid.resolution();
  const GridFrame frame = grid.frame();
  for (int d = 0; d < 8; ++d) {
    const GridCoord c{(d & 1) * r, ((d >> 1) & 1) * r, ((d >> 2) & 1) * r};
    if (grid.classify(c) != CornerClass::Exterior) {
      throw Error(Errc::BoundaryNotExterior, "domain corner is not exterior; increase padding");
    }
  }

  Overlay<GridOccupancy> occ{GridOccupancy{&grid}, {}, {}};
  std::vector<GridEdge> edges = find_crossing_edges(grid);
  remove_checkerboards(occ, cells_touching(edges, r), r, [&](const GridCoord& c) {
    const auto m = grid.margin(c);
    return m ? *m : -std::numeric_limits<double>::infinity();
  });
  if (!occ.forced_list.empty()) {
    std::vector<GridCoord> candidates = occ.forced_list;
    grid.for_each_band([&](const GridCoord& c, CornerClass, bool o, double) {
      if (o) candidates.push_back(c);
    });
    edges = crossing_edges_from(candidates, occ);
  }
  // An occupied corner on the outer layer would need cells outside the domain.
  for (const auto& e : edges) {
    const GridCoord inside = occ(e.start) ? e.start : e.end();
    if (std::min({inside.i, inside.j, inside.k}) <= 0 || std::max({inside.i, inside.j, inside.k}) >= r) {
      throw Error(Errc::BoundaryNotExterior, "surface reaches the domain boundary");
    }
  }

  std::vector<Crossing> crossings(edges.size());
  parallel_for(edges.size(), config.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const bool start_occ = occ(edges[e].start);
      const GridCoord inside = start_occ ? edges[e].start : edges[e].end();
      const GridCoord outside = start_occ ? edges[e].end() : edges[e].start;
      // Stored signs are exact; corners off the band are beyond the envelope.
      const bool known = grid.margin_nonnegative(inside) && !grid.margin_nonnegative(outside);
      auto x = try_bisect(frame, edges[e], start_occ, field, config.bisect_iters, known);
      if (!x) {
        // Forced corners have negative margin: fall back to the edge midpoint.
        const Vec3 mid = 0.5 * (frame.corner_position(edges[e].start) + frame.corner_position(edges[e].end()));
        x = Crossing{mid, field.sample(mid).gradient};
      }
      crossings[e] = *x;
    }
  });

  return build_mesh(r, occ, edges, crossings, config.refine, config.threads, config.transform);
}

DMCMesh extract_occupancy(std::span<const GridCoord> occupied, int resolution) {
  std::unordered_set<std::uint64_t> base;
  for (const auto& c : occupied) {
    if (c.i <= 0 || c.j <= 0 || c.k <= 0 || c.i >= resolution || c.j >= resolution || c.k >= resolution) {
      throw Error(Errc::BoundaryNotExterior, "occupied corner on the domain boundary");
    }
    base.insert(corner_key(c));
  }
  Overlay<SetOccupancy> occ{SetOccupancy{&base}, {}, {}};
  std::vector<GridCoord> candidates(occupied.begin(), occupied.end());
  auto edges = crossing_edges_from(candidates, occ);
  remove_checkerboards(occ, cells_touching(edges, resolution), resolution, [](const GridCoord&) { return 0.0; });
  if (!occ.forced_list.empty()) {
    for (const auto& c : occ.forced_list) {
      if (std::min({c.i, c.j, c.k}) <= 0 || std::max({c.i, c.j, c.k}) >= resolution) {
        throw Error(Errc::BoundaryNotExterior, "surface reaches the domain boundary");
      }
    }
    candidates.insert(candidates.end(), occ.forced_list.begin(), occ.forced_list.end());
    edges = crossing_edges_from(candidates, occ);
  }
  const GridFrame frame{resolution};
  std::vector<Crossing> crossings;
  crossings.reserve(edges.size());
  for (const auto& e : edges) {
    crossings.push_back({0.5 * (frame.corner_position(e.start) + frame.corner_position(e.end())), Vec3::Zero()});
  }
  return build_mesh(resolution, occ, edges, crossings, false, 1, {});
}

namespace {

std::vector<std::uint32_t> record_codes(std::span<const VoxelRecord> records) {
  std::vector<std::uint32_t> codes(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    codes[r] = morton_code(records[r].cell);
    if (r > 0 && codes[r] <= codes[r - 1]) {
      throw Error(Errc::NonCanonicalOrder, "records must be strictly ascending in Morton order");
    }
  }
  return codes;
}

std::int64_t find_record(const std::vector<std::uint32_t>& codes, const GridCoord& cell, int resolution) {
  if (!cell_in_grid(cell, resolution)) return -1;
  const std::uint32_t code = morton_code(cell);
  auto it = std::lower_bound(codes.begin(), codes.end(), code);
  return (it != codes.end() && *it == code) ? it - codes.begin() : -1;
}

}  // namespace

void validate_records(std::span<const VoxelRecord> records, int resolution) {
  const auto codes = record_codes(records);
  for (const auto& rec : records) {
    if (!cell_in_grid(rec.cell, resolution)) throw Error(Errc::InconsistentRecords, "record cell outside the grid");
    if (rec.vertex_count != cell_case(rec.occupancy).component_count) {
      throw Error(Errc::InconsistentRecords, "vertex count does not match the occupancy byte");
    }
  }
  // The forward half of the 26-neighborhood covers every adjacent pair once.
  for (const auto& rec : records) {
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dz * 9 + dy * 3 + dx <= 0) continue;
          const auto other = find_record(codes, rec.cell.offset(dx, dy, dz), resolution);
          if (other < 0) continue;
          const VoxelRecord& nb = records[static_cast<std::size_t>(other)];
          for (int c = 0; c < 8; ++c) {
            const int x = (c & 1) - dx, y = ((c >> 1) & 1) - dy, z = ((c >> 2) & 1) - dz;
            if (x < 0 || x > 1 || y < 0 || y > 1 || z < 0 || z > 1) continue;
            if (((rec.occupancy >> c) & 1) != ((nb.occupancy >> (x + 2 * y + 4 * z)) & 1)) {
              throw Error(Errc::InconsistentRecords, "adjacent records disagree on a shared corner");
            }
          }
        }
      }
    }
  }
}

TriangleMesh assemble_records(std::span<VoxelRecord> records, int resolution,
                              const NormalizationTransform& transform, bool choose_diagonals) {
  const auto codes = record_codes(records);
  const GridFrame frame{resolution};
  const double h = frame.spacing();

  std::vector<std::uint32_t> base(records.size() + 1, 0);
  for (std::size_t r = 0; r < records.size(); ++r) base[r + 1] = base[r] + records[r].vertex_count;
  std::vector<Vec3> positions;
  positions.reserve(base.back());
  for (const auto& rec : records) {
    for (int v = 0; v < rec.vertex_count; ++v) {
      positions.push_back(frame.corner_position(rec.cell) + h * rec.offsets[v]);
    }
  }

  std::vector<Triangle> tris;
  tris.reserve(2 * base.back());
  for (std::size_t r = 0; r < records.size(); ++r) {
    VoxelRecord& owner = records[r];
    if (choose_diagonals) owner.tri_bits = 0;
    for (int axis = 0; axis < 3; ++axis) {
      if (!edge_crosses(owner.occupancy, 4 * axis, 0, 1 << axis)) continue;
      const GridEdge edge{owner.cell, axis};
      std::array<std::uint32_t, 4> quad;
      const auto around = cells_around(edge);
      for (int q = 0; q < 4; ++q) {
        const auto idx = find_record(codes, around[q], resolution);
        if (idx < 0) throw Error(Errc::InconsistentRecords, "crossing edge is missing a neighboring record");
        const VoxelRecord& nb = records[static_cast<std::size_t>(idx)];
        const int comp = cell_case(nb.occupancy).edge_component[local_edge(edge, around[q])];
        if (comp < 0 || comp >= nb.vertex_count) {
          throw Error(Errc::InconsistentRecords, "neighbor record does not see the crossing edge");
        }
        quad[q] = base[static_cast<std::size_t>(idx)] + static_cast<std::uint32_t>(comp);
      }

      int bit;
      if (choose_diagonals) {
        const double d02 = (positions[quad[0]] - positions[quad[2]]).squaredNorm();
        const double d13 = (positions[quad[1]] - positions[quad[3]]).squaredNorm();
        if (d02 != d13) {
          bit = d02 < d13 ? 0 : 1;
        } else {
          const auto smallest = std::min_element(quad.begin(), quad.end()) - quad.begin();
          bit = smallest % 2 == 0 ? 0 : 1;
        }
        owner.tri_bits = static_cast<std::uint8_t>(owner.tri_bits | (bit << axis));
      } else {
        bit = (owner.tri_bits >> axis) & 1;
      }

      std::array<Triangle, 2> pair =
          bit == 0 ? std::array<Triangle, 2>{Triangle{quad[0], quad[1], quad[2]}, Triangle{quad[0], quad[2], quad[3]}}
                   : std::array<Triangle, 2>{Triangle{quad[0], quad[1], quad[3]}, Triangle{quad[1], quad[2], quad[3]}};
      // The cyclic order faces +axis; flip when the surface faces -axis.
      const bool faces_positive = (owner.occupancy & 1) != 0;
      for (auto& t : pair) {
        if (!faces_positive) std::swap(t[1], t[2]);
        tris.push_back(t);
      }
    }
  }
  return TriangleMesh(std::move(positions), std::move(tris), Provenance{"", transform});
}

}  // namespace sharpdmc
