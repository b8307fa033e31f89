#include "sharpdmc/codec.hpp"

#include "sharpdmc/error.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>

namespace sharpdmc {

namespace {

constexpr char kMagic[4] = {'T', 'P', 'M', 'C'};

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  ~BitWriter() { flush(); }

  void put(std::uint64_t value, int bits) {
    value &= bits == 64 ? ~0ull : ((1ull << bits) - 1);
    acc_ |= value << filled_;
    const int room = 64 - filled_;
    if (bits >= room) {
      for (int b = 0; b < 8; ++b) out_.push_back(static_cast<std::uint8_t>(acc_ >> (8 * b)));
      acc_ = room == 64 ? 0 : value >> room;
      filled_ = bits - room;
    } else {
      filled_ += bits;
    }
  }
  void flush() {
    for (int b = 0; b < filled_; b += 8) out_.push_back(static_cast<std::uint8_t>(acc_ >> b));
    acc_ = 0;
    filled_ = 0;
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::uint64_t acc_ = 0;
  int filled_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

  bool get(int bits, std::uint64_t& value) {
    if (pos_ + static_cast<std::size_t>(bits) > data_.size() * 8) return false;
    value = 0;
    for (int b = 0; b < bits; ++b, ++pos_) {
      value |= static_cast<std::uint64_t>((data_[pos_ >> 3] >> (pos_ & 7)) & 1u) << b;
    }
    return true;
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t at, std::size_t size) {
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < size; ++b) v |= static_cast<std::uint64_t>(bytes[at + b]) << (8 * b);
  return v;
}

std::uint32_t crc_of(std::span<const std::uint8_t> payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in slices.
  std::size_t done = 0;
  while (done < payload.size()) {
    const std::size_t n = std::min<std::size_t>(payload.size() - done, 1u << 30);
    crc = crc32(crc, payload.data() + done, static_cast<uInt>(n));
    done += n;
  }
  return static_cast<std::uint32_t>(crc);
}

enum class ParseOutcome { Ok, Truncated, Trailing };

ParseOutcome parse_records(std::span<const std::uint8_t> payload, std::uint32_t count,
                           std::vector<VoxelRecord>& out) {
  BitReader in(payload);
  out.clear();
  out.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    VoxelRecord rec;
    std::uint64_t v;
    if (!in.get(30, v)) return ParseOutcome::Truncated;
    rec.cell = {static_cast<int>(v & 0x3ff), static_cast<int>((v >> 10) & 0x3ff), static_cast<int>((v >> 20) & 0x3ff)};
    if (!in.get(8, v)) return ParseOutcome::Truncated;
    rec.occupancy = static_cast<std::uint8_t>(v);
    rec.vertex_count = cell_case(rec.occupancy).component_count;
    for (int c = 0; c < rec.vertex_count; ++c) {
      if (!in.get(30, v)) return ParseOutcome::Truncated;
      for (int a = 0; a < 3; ++a) {
        rec.offsets[c][a] = dequantize_offset(static_cast<std::uint32_t>((v >> (10 * a)) & 0x3ff));
      }
    }
    if (!in.get(3, v)) return ParseOutcome::Truncated;
    rec.tri_bits = static_cast<std::uint8_t>(v);
    out.push_back(rec);
  }
  // Only zero padding may follow, and never a whole spare byte.
  const std::size_t used = in.position();
  if ((payload.size() * 8) - used >= 8) return ParseOutcome::Trailing;
  std::uint64_t pad = 0;
  const int pad_bits = static_cast<int>(payload.size() * 8 - used);
  if (pad_bits > 0 && in.get(pad_bits, pad) && pad != 0) return ParseOutcome::Trailing;
  return ParseOutcome::Ok;
}

}  // namespace

std::uint32_t quantize_offset(double offset) {
  const double scaled = std::floor(offset * 1024.0);
  if (!(scaled > 0.0)) return 0;
  return scaled >= 1023.0 ? 1023u : static_cast<std::uint32_t>(scaled);
}

double dequantize_offset(std::uint32_t q) { return (static_cast<double>(q) + 0.5) / 1024.0; }

std::size_t record_bits(std::uint8_t occupancy) {
  return 30 + 8 + 30 * static_cast<std::size_t>(cell_case(occupancy).component_count) + 3;
}

std::vector<std::uint8_t> encode(const DMCMesh& mesh) {
  if (mesh.resolution > 1024) {
    throw Error(Errc::ResolutionTooHigh, "resolution " + std::to_string(mesh.resolution) + " exceeds 10-bit coordinates");
  }
  std::uint32_t prev = 0;
  for (std::size_t r = 0; r < mesh.records.size(); ++r) {
    const auto code = morton_code(mesh.records[r].cell);
    if (r > 0 && code <= prev) throw Error(Errc::NonCanonicalOrder, "records out of Morton order at index " + std::to_string(r));
    prev = code;
    if (mesh.records[r].vertex_count != cell_case(mesh.records[r].occupancy).component_count) {
      throw Error(Errc::InconsistentRecords, "vertex count does not match the occupancy byte");
    }
  }

  std::vector<std::uint8_t> out;
  std::size_t total_bits = 0;
  for (const auto& rec : mesh.records) total_bits += record_bits(rec.occupancy);
  out.reserve(kHeaderBytes + (total_bits + 7) / 8 + 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kCodecVersion);
  put_le(out, static_cast<std::uint16_t>(mesh.resolution));
  put_le(out, static_cast<std::uint32_t>(mesh.records.size()));
  put_le(out, mesh.transform.scale);
  for (int a = 0; a < 3; ++a) put_le(out, mesh.transform.translation[a]);

  std::vector<std::uint8_t> payload;
  payload.reserve((total_bits + 7) / 8);
  BitWriter bits(payload);
  for (const auto& rec : mesh.records) {
    bits.put(static_cast<std::uint64_t>(rec.cell.i) | (static_cast<std::uint64_t>(rec.cell.j) << 10) |
                 (static_cast<std::uint64_t>(rec.cell.k) << 20),
             30);
    bits.put(rec.occupancy, 8);
    for (int c = 0; c < rec.vertex_count; ++c) {
      std::uint64_t packed = 0;
      for (int a = 0; a < 3; ++a) packed |= static_cast<std::uint64_t>(quantize_offset(rec.offsets[c][a])) << (10 * a);
      bits.put(packed, 30);
    }
    bits.put(rec.tri_bits & 7u, 3);
  }
  bits.flush();
  out.insert(out.end(), payload.begin(), payload.end());
  put_le(out, crc_of(payload));
  return out;
}

DMCMesh decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(Errc::BadMagic, "stream does not start with TPMC");
  }
  if (bytes.size() < 5) throw Error(Errc::TruncatedStream, "missing header");
  if (bytes[4] != kCodecVersion) throw Error(Errc::BadVersion, "unsupported version " + std::to_string(bytes[4]));
  if (bytes.size() < kHeaderBytes + 4) throw Error(Errc::TruncatedStream, "stream shorter than header and trailer");

  DMCMesh mesh;
  mesh.resolution = static_cast<int>(get_le(bytes, 5, 2));
  const auto count = static_cast<std::uint32_t>(get_le(bytes, 7, 4));
  mesh.transform.scale = std::bit_cast<double>(get_le(bytes, 11, 8));
  for (int a = 0; a < 3; ++a) mesh.transform.translation[a] = std::bit_cast<double>(get_le(bytes, 19 + 8 * a, 8));

  const auto payload = bytes.subspan(kHeaderBytes, bytes.size() - kHeaderBytes - 4);
  const auto stored_crc = static_cast<std::uint32_t>(get_le(bytes, bytes.size() - 4, 4));
  const ParseOutcome parsed = parse_records(payload, count, mesh.records);
  if (crc_of(payload) != stored_crc) {
    // A short stream also fails the checksum; name the more specific cause.
    if (parsed == ParseOutcome::Truncated) throw Error(Errc::TruncatedStream, "payload ends inside a record");
    throw Error(Errc::ChecksumMismatch, "payload CRC-32 does not match the trailer");
  }
  if (parsed == ParseOutcome::Truncated) throw Error(Errc::TruncatedStream, "payload ends inside a record");
  if (parsed == ParseOutcome::Trailing) throw Error(Errc::TrailingData, "unexpected bits after the last record");
  if (mesh.resolution < 1 || mesh.resolution > 1024) {
    throw Error(Errc::ResolutionTooHigh, "stored resolution " + std::to_string(mesh.resolution));
  }
  for (std::size_t r = 1; r < mesh.records.size(); ++r) {
    if (morton_code(mesh.records[r].cell) <= morton_code(mesh.records[r - 1].cell)) {
      throw Error(Errc::NonCanonicalOrder, "records out of Morton order at index " + std::to_string(r));
    }
  }
  return mesh;
}

TriangleMesh reassemble(std::span<const VoxelRecord> records, int resolution,
                        const NormalizationTransform& transform) {
  validate_records(records, resolution);
  std::vector<VoxelRecord> copy(records.begin(), records.end());
  return assemble_records(copy, resolution, transform, false);
}

std::size_t indexed_baseline_bytes(const TriangleMesh& mesh) {
  return mesh.vertex_count() * 3 * sizeof(float) + mesh.triangle_count() * 3 * sizeof(std::uint32_t);
}

}  // namespace sharpdmc
