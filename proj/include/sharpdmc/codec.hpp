#pragma once

#include "sharpdmc/dmc.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sharpdmc {

// Stream layout (all multi-byte header fields little-endian):
//   "TPMC" | version u8 | resolution u16 | record_count u32 | scale, tx, ty, tz f64
//   payload: records packed LSB-first, zero-padded to a byte
//   trailer: CRC-32 of the payload, u32
//
// Record: i, j, k (10 bits each) | occupancy (8) | one 30-bit offset triple per
// crossing component | tri_bits (3). The component count comes from the case
// table and is never stored.

inline constexpr std::uint8_t kCodecVersion = 1;
inline constexpr std::size_t kHeaderBytes = 43;
inline constexpr int kOffsetBits = 10;

/// Quantized offset bucket, floor(offset * 1024) clamped to [0, 1023].
std::uint32_t quantize_offset(double offset);
/// Bucket center, (q + 0.5) / 1024.
double dequantize_offset(std::uint32_t q);

/// Bit width of one record with the given occupancy byte.
std::size_t record_bits(std::uint8_t occupancy);

std::vector<std::uint8_t> encode(const DMCMesh& mesh);

/// Records, resolution and transform only; `assembled` stays empty.
DMCMesh decode(std::span<const std::uint8_t> bytes);

/// Rebuilds the triangle mesh (normalized coordinates) from decoded records,
/// following the stored triangulation bits.
TriangleMesh reassemble(std::span<const VoxelRecord> records, int resolution,
                        const NormalizationTransform& transform);

/// Size of the plain binary indexed-triangle serialization of `mesh`
/// (three float32 per vertex, three uint32 per triangle).
std::size_t indexed_baseline_bytes(const TriangleMesh& mesh);

}  // namespace sharpdmc
