#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace sharpdmc {

// Local cell numbering.
//   corner c = x + 2y + 4z, x/y/z in {0, 1}
//   edge   e = 4 * axis + v, where v packs the offsets of the two other axes in
//          increasing axis order (x-edges: v = y + 2z, y-edges: v = x + 2z,
//          z-edges: v = x + 2y); the edge runs from offset 0 to 1 along `axis`.

inline constexpr int edge_axis(int e) { return e >> 2; }

/// (start corner, end corner) of a local edge.
std::pair<int, int> edge_corners(int e);

/// Occupancy byte bit c is corner c.
inline constexpr bool edge_crosses(std::uint8_t occupancy, int /*e*/, int start, int end) {
  return (((occupancy >> start) ^ (occupancy >> end)) & 1) != 0;
}

/// Crossing edges of one cell grouped into connected surface patches. Patches
/// connect across faces: a face with two crossing edges joins them; a face with
/// four (the ambiguous checkerboard) pairs the two edges around the face's
/// lowest-numbered corner and the two around its diagonal partner. That rule
/// looks only at positions, so a byte and its complement share a partition and
/// two cells sharing a face always agree on it.
struct CellCase {
  std::uint8_t component_count = 0;
  std::array<std::int8_t, 12> edge_component{};  // -1 for non-crossing edges
};

const CellCase& cell_case(std::uint8_t occupancy);

/// True when some face of the cell shows the checkerboard pattern.
bool has_ambiguous_face(std::uint8_t occupancy);

}  // namespace sharpdmc
