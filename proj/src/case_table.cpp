#include "sharpdmc/case_table.hpp"

#include <numeric>
#include <vector>

namespace sharpdmc {

namespace {

constexpr int corner_index(int x, int y, int z) { return x + 2 * y + 4 * z; }

struct FaceEdges {
  int corners[4];  // ascending local index
  int edges[4];
};

std::array<FaceEdges, 6> make_faces() {
  std::array<FaceEdges, 6> faces{};
  int f = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side, ++f) {
      int nc = 0;
      for (int c = 0; c < 8; ++c) {
        const int coord = (c >> axis) & 1;
        if (coord == side) faces[f].corners[nc++] = c;
      }
      int ne = 0;
      for (int e = 0; e < 12; ++e) {
        if (edge_axis(e) == axis) continue;
        auto [a, b] = edge_corners(e);
        if (((a >> axis) & 1) == side && ((b >> axis) & 1) == side) faces[f].edges[ne++] = e;
      }
    }
  }
  return faces;
}

std::array<CellCase, 256> make_table() {
  const auto faces = make_faces();
  std::array<CellCase, 256> table{};
  for (int occ = 0; occ < 256; ++occ) {
    const auto byte = static_cast<std::uint8_t>(occ);
    std::array<int, 12> parent;
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    std::array<bool, 12> crossing{};
    for (int e = 0; e < 12; ++e) {
      auto [a, b] = edge_corners(e);
      crossing[e] = edge_crosses(byte, e, a, b);
    }
    for (const auto& face : faces) {
      int cross[4];
      int n = 0;
      for (int e : face.edges) {
        if (crossing[e]) cross[n++] = e;
      }
      if (n == 2) {
        unite(cross[0], cross[1]);
      } else if (n == 4) {
        const int lead = face.corners[0];
        int around[2];
        int m = 0;
        for (int e : face.edges) {
          auto [a, b] = edge_corners(e);
          if (a == lead || b == lead) around[m++] = e;
        }
        unite(around[0], around[1]);
        int others[2];
        m = 0;
        for (int e : face.edges) {
          if (e != around[0] && e != around[1]) others[m++] = e;
        }
        unite(others[0], others[1]);
      }
    }
    CellCase& entry = table[static_cast<std::size_t>(occ)];
    entry.edge_component.fill(-1);
    std::array<int, 12> root_to_component;
    root_to_component.fill(-1);
    for (int e = 0; e < 12; ++e) {
      if (!crossing[e]) continue;
      const int root = find(e);
      if (root_to_component[root] < 0) root_to_component[root] = entry.component_count++;
      entry.edge_component[e] = static_cast<std::int8_t>(root_to_component[root]);
    }
  }
  return table;
}

}  // namespace

std::pair<int, int> edge_corners(int e) {
  const int axis = e >> 2;
  const int v = e & 3;
  const int p = v & 1;
  const int q = (v >> 1) & 1;
  switch (axis) {
    case 0: return {corner_index(0, p, q), corner_index(1, p, q)};
    case 1: return {corner_index(p, 0, q), corner_index(p, 1, q)};
    default: return {corner_index(p, q, 0), corner_index(p, q, 1)};
  }
}

const CellCase& cell_case(std::uint8_t occupancy) {
  static const std::array<CellCase, 256> table = make_table();
  return table[occupancy];
}

bool has_ambiguous_face(std::uint8_t occupancy) {
  static const auto faces = make_faces();
  for (const auto& face : faces) {
    const int a = (occupancy >> face.corners[0]) & 1;
    const int b = (occupancy >> face.corners[1]) & 1;
    const int c = (occupancy >> face.corners[2]) & 1;
    const int d = (occupancy >> face.corners[3]) & 1;
    // corners ascending: [0]/[3] and [1]/[2] are the diagonals.
    if (a == d && b == c && a != b) return true;
  }
  return false;
}

}  // namespace sharpdmc
