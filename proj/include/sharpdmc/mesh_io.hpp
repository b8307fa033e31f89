#pragma once

#include "sharpdmc/mesh.hpp"

#include <filesystem>

namespace sharpdmc {

enum class MeshFormat { Auto, Obj, Ply, Stl };

struct LoadOptions {
  bool weld = true;
  /// Welding tolerance in normalized units (longest bounding-box axis = 2).
  double weld_tolerance = 1e-9;
};

/// Loads OBJ, PLY (ascii / binary little-endian) or STL (ascii / binary).
/// Degenerate triangles are dropped and near-duplicate vertices welded.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto,
                       const LoadOptions& options = {});

struct SaveOptions {
  bool binary = false;  // PLY only
};

/// Writes OBJ or PLY (format Auto picks from the extension). Ascii output uses
/// 9 significant digits.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path,
               MeshFormat format = MeshFormat::Auto, const SaveOptions& options = {});

MeshFormat format_from_extension(const std::filesystem::path& path);

}  // namespace sharpdmc
