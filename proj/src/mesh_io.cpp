#include "sharpdmc/mesh_io.hpp"

#include "sharpdmc/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace sharpdmc {

namespace fs = std::filesystem;

namespace {

struct RawMesh {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

void add_polygon(RawMesh& raw, const std::vector<std::int64_t>& poly) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    raw.triangles.push_back({static_cast<std::uint32_t>(poly[0]),
                             static_cast<std::uint32_t>(poly[k]),
                             static_cast<std::uint32_t>(poly[k + 1])});
  }
}

RawMesh parse_obj(const std::string& text, const fs::path& path) {
  RawMesh raw;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::int64_t> poly;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) parse_fail(path, line_no, "malformed vertex");
      raw.positions.push_back(p);
    } else if (tag == "f") {
      poly.clear();
      std::string tok;
      while (ls >> tok) {
        std::int64_t idx = 0;
        auto slash = tok.find('/');
        std::string head = tok.substr(0, slash);
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
          parse_fail(path, line_no, "bad face index '" + tok + "'");
        }
        idx = idx < 0 ? static_cast<std::int64_t>(raw.positions.size()) + idx : idx - 1;
        if (idx < 0 || idx >= static_cast<std::int64_t>(raw.positions.size())) {
          parse_fail(path, line_no, "face index out of range");
        }
        poly.push_back(idx);
      }
      if (poly.size() < 3) parse_fail(path, line_no, "face with fewer than 3 vertices");
      add_polygon(raw, poly);
    }
    // vt, vn, o, g, s, usemtl, mtllib: ignored.
  }
  return raw;
}

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType ply_type(const std::string& name, const fs::path& path) {
  static const std::pair<const char*, PlyType> table[] = {
      {"char", PlyType::Int8},      {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},
      {"uint8", PlyType::UInt8},    {"short", PlyType::Int16},     {"int16", PlyType::Int16},
      {"ushort", PlyType::UInt16},  {"uint16", PlyType::UInt16},   {"int", PlyType::Int32},
      {"int32", PlyType::Int32},    {"uint", PlyType::UInt32},     {"uint32", PlyType::UInt32},
      {"float", PlyType::Float32},  {"float32", PlyType::Float32}, {"double", PlyType::Float64},
      {"float64", PlyType::Float64}};
  for (const auto& [n, t] : table) {
    if (name == n) return t;
  }
  throw Error(Errc::ParseError, path.string() + ": unknown PLY type '" + name + "'");
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

double read_binary(const char* p, PlyType t) {
  switch (t) {
    case PlyType::Int8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::UInt8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::Int16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::UInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::Int32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::UInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::Float32: { float v; std::memcpy(&v, p, 4); return v; }
    case PlyType::Float64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
  PlyType type = PlyType::Float32;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

RawMesh parse_ply(const std::string& data, const fs::path& path) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    auto end = data.find('\n', pos);
    if (end == std::string::npos) throw Error(Errc::ParseError, path.string() + ": truncated PLY header");
    std::string line = data.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next_line() != "ply") throw Error(Errc::ParseError, path.string() + ": missing 'ply' magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    std::istringstream ls(next_line());
    std::string tag;
    ls >> tag;
    if (tag == "end_header") break;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt != "ascii") throw Error(Errc::ParseError, path.string() + ": unsupported PLY format " + fmt);
    } else if (tag == "element") {
      PlyElement el;
      ls >> el.name >> el.count;
      elements.push_back(el);
    } else if (tag == "property") {
      if (elements.empty()) throw Error(Errc::ParseError, path.string() + ": property before element");
      PlyProperty prop;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, it;
        ls >> ct >> it;
        prop.is_list = true;
        prop.count_type = ply_type(ct, path);
        prop.type = ply_type(it, path);
      } else {
        prop.type = ply_type(type, path);
      }
      ls >> prop.name;
      elements.back().props.push_back(prop);
    }
  }

  RawMesh raw;
  std::istringstream ascii(binary ? std::string() : data.substr(pos));
  std::size_t line_no = 0;
  std::vector<std::int64_t> poly;

  for (const auto& el : elements) {
    for (std::size_t row = 0; row < el.count; ++row) {
      Vec3 p = Vec3::Zero();
      poly.clear();
      std::istringstream ls;
      if (!binary) {
        std::string line;
        do {
          if (!std::getline(ascii, line)) {
            throw Error(Errc::ParseError, path.string() + ": unexpected end of PLY data");
          }
          ++line_no;
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        ls.str(line);
      }
      auto read_value = [&](PlyType t) -> double {
        if (binary) {
          if (pos + ply_size(t) > data.size()) {
            throw Error(Errc::ParseError, path.string() + ": truncated binary PLY at offset " + std::to_string(pos));
          }
          double v = read_binary(data.data() + pos, t);
          pos += ply_size(t);
          return v;
        }
        double v;
        if (!(ls >> v)) {
          throw Error(Errc::ParseError, path.string() + ": PLY data line " + std::to_string(line_no));
        }
        return v;
      };
      for (const auto& prop : el.props) {
        if (prop.is_list) {
          auto n = static_cast<std::size_t>(read_value(prop.count_type));
          for (std::size_t k = 0; k < n; ++k) {
            auto idx = static_cast<std::int64_t>(read_value(prop.type));
            if (el.name == "face") poly.push_back(idx);
          }
        } else {
          double v = read_value(prop.type);
          if (el.name == "vertex") {
            if (prop.name == "x") p[0] = v;
            else if (prop.name == "y") p[1] = v;
            else if (prop.name == "z") p[2] = v;
          }
        }
      }
      if (el.name == "vertex") raw.positions.push_back(p);
      if (el.name == "face") {
        for (auto idx : poly) {
          if (idx < 0 || idx >= static_cast<std::int64_t>(raw.positions.size())) {
            throw Error(Errc::ParseError, path.string() + ": face index out of range");
          }
        }
        if (poly.size() >= 3) add_polygon(raw, poly);
      }
    }
  }
  return raw;
}

RawMesh parse_stl(const std::string& data, const fs::path& path) {
  RawMesh raw;
  const bool binary_sized = data.size() >= 84 && [&] {
    std::uint32_t n;
    std::memcpy(&n, data.data() + 80, 4);
    return data.size() == 84 + 50ull * n;
  }();
  if (binary_sized) {
    std::uint32_t n;
    std::memcpy(&n, data.data() + 80, 4);
    for (std::uint32_t t = 0; t < n; ++t) {
      const char* rec = data.data() + 84 + 50ull * t + 12;
      Triangle tri;
      for (int k = 0; k < 3; ++k) {
        float xyz[3];
        std::memcpy(xyz, rec + 12 * k, 12);
        tri[k] = static_cast<std::uint32_t>(raw.positions.size());
        raw.positions.emplace_back(xyz[0], xyz[1], xyz[2]);
      }
      raw.triangles.push_back(tri);
    }
    return raw;
  }

  std::istringstream in(data);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> loop;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "vertex") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) parse_fail(path, line_no, "malformed STL vertex");
      loop.push_back(static_cast<std::uint32_t>(raw.positions.size()));
      raw.positions.push_back(p);
    } else if (tag == "endloop") {
      if (loop.size() != 3) parse_fail(path, line_no, "STL facet without 3 vertices");
      raw.triangles.push_back({loop[0], loop[1], loop[2]});
      loop.clear();
    } else if (tag != "solid" && tag != "facet" && tag != "outer" && tag != "endfacet" &&
               tag != "endsolid") {
      parse_fail(path, line_no, "unexpected STL token '" + tag + "'");
    }
  }
  return raw;
}

}  // namespace

MeshFormat format_from_extension(const fs::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".ply") return MeshFormat::Ply;
  if (ext == ".stl") return MeshFormat::Stl;
  return MeshFormat::Auto;
}

TriangleMesh load_mesh(const fs::path& path, MeshFormat format, const LoadOptions& options) {
  if (!fs::exists(path)) throw Error(Errc::FileNotFound, path.string());
  if (format == MeshFormat::Auto) format = format_from_extension(path);
  const std::string data = read_file(path);
  if (format == MeshFormat::Auto) {
    if (data.rfind("ply", 0) == 0) format = MeshFormat::Ply;
    else if (data.rfind("solid", 0) == 0 || data.size() >= 84) format = MeshFormat::Stl;
    else format = MeshFormat::Obj;
  }

  RawMesh raw;
  switch (format) {
    case MeshFormat::Obj: raw = parse_obj(data, path); break;
    case MeshFormat::Ply: raw = parse_ply(data, path); break;
    case MeshFormat::Stl: raw = parse_stl(data, path); break;
    case MeshFormat::Auto: break;
  }
  if (raw.triangles.empty()) throw Error(Errc::EmptyMesh, path.string() + " has no triangles");

  TriangleMesh mesh(std::move(raw.positions), std::move(raw.triangles),
                    Provenance{path.string(), {}});
  const double half_extent = 0.5 * mesh.bounds().extent().maxCoeff();
  if (options.weld) mesh = weld_vertices(mesh, options.weld_tolerance * half_extent);
  mesh = drop_degenerate(mesh, 1e-12 * half_extent * half_extent);
  if (mesh.empty()) throw Error(Errc::EmptyMesh, path.string() + " has no valid triangles");
  return mesh;
}

void save_mesh(const TriangleMesh& mesh, const fs::path& path, MeshFormat format,
               const SaveOptions& options) {
  if (mesh.empty()) throw Error(Errc::EmptyMesh, "refusing to write a mesh without triangles");
  if (format == MeshFormat::Auto) format = format_from_extension(path);
  if (format != MeshFormat::Obj && format != MeshFormat::Ply) {
    throw Error(Errc::IoError, "unsupported output format for " + path.string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");

  char buf[128];
  if (format == MeshFormat::Obj) {
    for (const auto& p : mesh.positions()) {
      std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", p[0], p[1], p[2]);
      out << buf;
    }
    for (const auto& t : mesh.triangles()) {
      out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
  } else {
    out << "ply\nformat " << (options.binary ? "binary_little_endian" : "ascii") << " 1.0\n"
        << "element vertex " << mesh.vertex_count() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "element face " << mesh.triangle_count() << "\n"
        << "property list uchar uint vertex_indices\nend_header\n";
    if (options.binary) {
      for (const auto& p : mesh.positions()) {
        float xyz[3] = {static_cast<float>(p[0]), static_cast<float>(p[1]), static_cast<float>(p[2])};
        out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
      }
      for (const auto& t : mesh.triangles()) {
        const std::uint8_t n = 3;
        out.write(reinterpret_cast<const char*>(&n), 1);
        out.write(reinterpret_cast<const char*>(t.data()), 12);
      }
    } else {
      for (const auto& p : mesh.positions()) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
        out << buf;
      }
      for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
  }
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace sharpdmc
