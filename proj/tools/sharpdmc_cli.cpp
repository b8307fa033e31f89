// Command-line front end: remesh, encode, decode, eval, stats.
//
// Exit codes: 0 success, 1 runtime or IO failure, 2 usage or configuration
// error. Every flag can also be set through a SHARPDMC_* environment variable;
// an explicit flag wins.

#include "sharpdmc/codec.hpp"
#include "sharpdmc/error.hpp"
#include "sharpdmc/mesh_io.hpp"
#include "sharpdmc/metrics.hpp"
#include "sharpdmc/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>

namespace fs = std::filesystem;
using namespace sharpdmc;

namespace {

struct RemeshFlags {
  int resolution = 256;
  double epsilon_h = 1.5;
  int bisect_iters = 12;
  std::string refine = "auto";
  std::string mode = "linf";
  int threads = 0;
  std::uint64_t seed = 0;
  double padding = -1.0;  // negative: automatic

  RemeshConfig config() const {
    RemeshConfig c;
    c.resolution = resolution;
    c.epsilon_h = epsilon_h;
    c.bisect_iters = bisect_iters;
    if (refine == "on") c.refine = true;
    if (refine == "off") c.refine = false;
    c.mode = mode == "l2" ? DistanceMode::L2 : DistanceMode::Linf;
    c.threads = threads;
    c.seed = seed;
    if (padding >= 0.0) c.padding = padding;
    return c;
  }
};

void add_remesh_flags(CLI::App* app, RemeshFlags& f) {
  app->add_option("-r,--resolution", f.resolution, "Grid cells per axis, a power of two in [32, 1024]")
      ->envname("SHARPDMC_RESOLUTION")
      ->capture_default_str();
  app->add_option("--epsilon-h", f.epsilon_h, "Offset distance in grid spacings")
      ->envname("SHARPDMC_EPSILON_H")
      ->capture_default_str();
  app->add_option("--bisect-iters", f.bisect_iters, "Bisection steps per crossing edge")
      ->envname("SHARPDMC_BISECT_ITERS")
      ->capture_default_str();
  app->add_option("--refine", f.refine, "Tangent-plane vertex placement (auto: on below R=512)")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->envname("SHARPDMC_REFINE")
      ->capture_default_str();
  app->add_option("--mode", f.mode, "Distance used for the offset surface")
      ->check(CLI::IsMember({"linf", "l2"}))
      ->envname("SHARPDMC_MODE")
      ->capture_default_str();
  app->add_option("--threads", f.threads, "Worker threads (0 = all hardware threads)")
      ->envname("SHARPDMC_THREADS")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Seed for sampled diagnostics")->envname("SHARPDMC_SEED")->capture_default_str();
  app->add_option("--padding", f.padding,
                  "Normalization margin in normalized units (negative: (2*epsilon_h + 2) * h)")
      ->envname("SHARPDMC_PADDING")
      ->capture_default_str();
}

struct EvalFlags {
  std::size_t n = 100000;
  double tau = 0.005;
  std::uint64_t seed = 0;
  bool sharp = true;
  int threads = 0;
  std::string format = "text";

  EvalOptions options() const { return {n, tau, seed, sharp, threads}; }
};

void add_eval_flags(CLI::App* app, EvalFlags& f, bool with_threads) {
  app->add_option("-n,--samples", f.n, "Surface samples per mesh")->envname("SHARPDMC_SAMPLES")->capture_default_str();
  app->add_option("--tau", f.tau, "F1 distance threshold in normalized units")
      ->envname("SHARPDMC_TAU")
      ->capture_default_str();
  app->add_option("--eval-seed", f.seed, "Sampling seed")->envname("SHARPDMC_EVAL_SEED")->capture_default_str();
  app->add_option("--sharp", f.sharp, "Compute F1 on sharp-edge samples (true/false)")
      ->envname("SHARPDMC_SHARP")
      ->capture_default_str();
  if (with_threads) {
    app->add_option("--threads", f.threads, "Worker threads (0 = all hardware threads)")
        ->envname("SHARPDMC_THREADS")
        ->capture_default_str();
  }
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

bool is_tpmc(const fs::path& path) { return path.extension() == ".tpmc"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_mesh_stats(const TriangleMesh& mesh) {
  const TopologyReport topo = check_watertight_manifold(mesh);
  std::printf("vertices=%zu faces=%zu watertight=%s manifold=%s oriented=%s euler=%lld\n", mesh.vertex_count(),
              mesh.triangle_count(), topo.closed ? "true" : "false", topo.edge_manifold ? "true" : "false",
              topo.oriented ? "true" : "false", topo.euler_characteristic);
}

void print_timings(const StageTimings& t) {
  std::printf("stage Voxelization %.3f s\n", t.voxelization);
  std::printf("stage Flood-fill %.3f s\n", t.flood_fill);
  std::printf("stage SDF %.3f s\n", t.sdf);
  std::printf("stage Extraction %.3f s\n", t.extraction);
  std::printf("stage Compression %.3f s\n", t.compression);
  std::printf("stage Total %.3f s\n", t.total());
}

RemeshResult run_remesh(const fs::path& input, const RemeshConfig& config) {
  config.validate();
  const TriangleMesh source = load_mesh(input);
  RemeshResult result = remesh(source, config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  return result;
}

/// Writes the remesh result to `output` by extension; returns encoded size or 0.
std::size_t write_result(RemeshResult& result, const fs::path& output) {
  if (is_tpmc(output)) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto bytes = encode(result.dmc);
    result.timings.compression = seconds_since(t0);
    write_bytes(output, bytes);
    return bytes.size();
  }
  save_mesh(result.output, output);
  return 0;
}

int cmd_remesh(const fs::path& input, const fs::path& output, const RemeshFlags& flags) {
  RemeshResult result = run_remesh(input, flags.config());
  const std::size_t encoded = write_result(result, output);
  print_timings(result.timings);
  print_mesh_stats(result.output);
  if (encoded > 0) {
    std::printf("encoded_bytes=%zu baseline_bytes=%zu ratio=%.4f\n", encoded, indexed_baseline_bytes(result.output),
                static_cast<double>(encoded) / static_cast<double>(indexed_baseline_bytes(result.output)));
  }
  return 0;
}

int cmd_encode(const fs::path& input, const fs::path& output, const RemeshFlags& flags) {
  std::vector<std::uint8_t> bytes;
  const auto t0 = std::chrono::steady_clock::now();
  if (is_tpmc(input)) {
    // Re-canonicalize an existing stream: decode, check, encode again.
    const DMCMesh mesh = decode(read_bytes(input));
    validate_records(mesh.records, mesh.resolution);
    bytes = encode(mesh);
  } else {
    RemeshResult result = run_remesh(input, flags.config());
    bytes = encode(result.dmc);
  }
  write_bytes(output, bytes);
  std::printf("encoded_bytes=%zu seconds=%.3f\n", bytes.size(), seconds_since(t0));
  return 0;
}

int cmd_decode(const fs::path& input, const fs::path& output) {
  const auto t0 = std::chrono::steady_clock::now();
  const DMCMesh mesh = decode(read_bytes(input));
  const TriangleMesh normalized = reassemble(mesh.records, mesh.resolution, mesh.transform);
  const double decode_seconds = seconds_since(t0);
  if (is_tpmc(output)) {
    write_bytes(output, encode(mesh));
  } else {
    save_mesh(normalized.transformed(mesh.transform.inverse()), output);
  }
  std::printf("records=%zu seconds=%.3f\n", mesh.records.size(), decode_seconds);
  print_mesh_stats(normalized);
  return 0;
}

int cmd_eval(const fs::path& pred, const fs::path& ref, const EvalFlags& flags) {
  const TriangleMesh p = load_mesh(pred);
  const TriangleMesh r = load_mesh(ref);
  const FidelityReport report = evaluate_meshes(p, r, flags.options());
  if (!report.f1_sharp && !report.note.empty()) std::cerr << "note: " << report.note << "\n";
  std::printf("%s\n", flags.format == "json" ? report.to_json().c_str() : report.to_text().c_str());
  return 0;
}

int cmd_stats(const fs::path& dir, const RemeshFlags& rflags, const EvalFlags& eflags) {
  if (!fs::is_directory(dir)) throw Error(Errc::FileNotFound, dir.string() + " is not a directory");
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".obj" || ext == ".ply" || ext == ".stl")) inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  int status = 0;
  for (const auto& input : inputs) {
    nlohmann::json rec;
    rec["mesh"] = input.filename().string();
    try {
      const TriangleMesh source = load_mesh(input);
      RemeshResult result = remesh(source, rflags.config());
      const auto t0 = std::chrono::steady_clock::now();
      const auto bytes = encode(result.dmc);
      result.timings.compression = seconds_since(t0);
      const TopologyReport topo = check_watertight_manifold(result.output);
      EvalOptions eo = eflags.options();
      eo.threads = rflags.threads;
      const FidelityReport report = evaluate_meshes(result.output, source, eo);
      rec["vertices"] = result.output.vertex_count();
      rec["faces"] = result.output.triangle_count();
      rec["watertight"] = topo.closed;
      rec["manifold"] = topo.edge_manifold;
      rec["oriented"] = topo.oriented;
      rec["euler"] = topo.euler_characteristic;
      rec["encoded_bytes"] = bytes.size();
      rec["baseline_bytes"] = indexed_baseline_bytes(result.output);
      rec["timings"] = {{"voxelization", result.timings.voxelization}, {"flood_fill", result.timings.flood_fill},
                        {"sdf", result.timings.sdf},                   {"extraction", result.timings.extraction},
                        {"compression", result.timings.compression}};
      rec["metrics"] = nlohmann::json::parse(report.to_json());
      rec["warnings"] = result.warnings;
    } catch (const Error& e) {
      rec["error"] = e.what();
      status = 1;
    }
    std::printf("%s\n", rec.dump().c_str());
  }
  return status;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ResolutionOutOfRange:
    case Errc::InvalidConfig:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp-feature-preserving remeshing with a compact voxel codec"};
  app.require_subcommand(1);

  RemeshFlags remesh_flags, encode_flags, stats_remesh;
  EvalFlags eval_flags, stats_eval;
  std::string in_a, in_b, out_path, dir;

  auto* remesh_cmd = app.add_subcommand("remesh", "Remesh a triangle mesh into a closed manifold (.obj, .ply or .tpmc output)");
  remesh_cmd->add_option("input", in_a, "Input mesh (.obj, .ply, .stl)")->required();
  remesh_cmd->add_option("output", out_path, "Output path (.obj, .ply, .tpmc)")->required();
  add_remesh_flags(remesh_cmd, remesh_flags);

  auto* encode_cmd = app.add_subcommand("encode", "Remesh and encode to .tpmc, or re-encode a .tpmc stream");
  encode_cmd->add_option("input", in_a, "Input mesh or .tpmc stream")->required();
  encode_cmd->add_option("output", out_path, "Output .tpmc path")->required();
  add_remesh_flags(encode_cmd, encode_flags);

  auto* decode_cmd = app.add_subcommand("decode", "Decode a .tpmc stream to a mesh (or a canonical .tpmc)");
  decode_cmd->add_option("input", in_a, "Input .tpmc stream")->required();
  decode_cmd->add_option("output", out_path, "Output path (.obj, .ply, .tpmc)")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Compare a predicted mesh against a reference");
  eval_cmd->add_option("pred", in_a, "Predicted mesh")->required();
  eval_cmd->add_option("ref", in_b, "Reference mesh")->required();
  add_eval_flags(eval_cmd, eval_flags, true);
  eval_cmd->add_option("--format", eval_flags.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->envname("SHARPDMC_FORMAT")
      ->capture_default_str();

  auto* stats_cmd = app.add_subcommand("stats", "Remesh and evaluate every mesh in a directory (one JSON line each)");
  stats_cmd->add_option("dir", dir, "Directory of .obj/.ply/.stl meshes")->required();
  add_remesh_flags(stats_cmd, stats_remesh);
  add_eval_flags(stats_cmd, stats_eval, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*remesh_cmd) return cmd_remesh(in_a, out_path, remesh_flags);
    if (*encode_cmd) return cmd_encode(in_a, out_path, encode_flags);
    if (*decode_cmd) return cmd_decode(in_a, out_path);
    if (*eval_cmd) return cmd_eval(in_a, in_b, eval_flags);
    if (*stats_cmd) return cmd_stats(dir, stats_remesh, stats_eval);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
