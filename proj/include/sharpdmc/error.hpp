#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sharpdmc {

enum class Errc {
  FileNotFound,
  ParseError,
  EmptyMesh,
  IoError,
  DegenerateBounds,
  NonManifoldInput,
  ResolutionOutOfRange,
  NoSignChange,
  BoundaryNotExterior,
  ResolutionTooHigh,
  NonCanonicalOrder,
  BadMagic,
  BadVersion,
  ChecksumMismatch,
  TruncatedStream,
  TrailingData,
  InconsistentRecords,
  EmptySample,
  NoSharpEdges,
  InvalidConfig,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyMesh: return "EmptyMesh";
    case Errc::IoError: return "IoError";
    case Errc::DegenerateBounds: return "DegenerateBounds";
    case Errc::NonManifoldInput: return "NonManifoldInput";
    case Errc::ResolutionOutOfRange: return "ResolutionOutOfRange";
    case Errc::NoSignChange: return "NoSignChange";
    case Errc::BoundaryNotExterior: return "BoundaryNotExterior";
    case Errc::ResolutionTooHigh: return "ResolutionTooHigh";
    case Errc::NonCanonicalOrder: return "NonCanonicalOrder";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::TruncatedStream: return "TruncatedStream";
    case Errc::TrailingData: return "TrailingData";
    case Errc::InconsistentRecords: return "InconsistentRecords";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NoSharpEdges: return "NoSharpEdges";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure surfaced by the library carries one of the Errc kinds so
/// callers (and the CLI) can report it by name.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sharpdmc
