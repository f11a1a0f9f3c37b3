#pragma once

// Binary sketch format, little-endian throughout.
//
//   header (42 bytes)
//     magic "BASK" | version u16 | kind u8 | flags u8 | n u64 | s u32 | d u16 |
//     k u32 | c_s f64 | master_seed u64
//   payload
//     CM, CS  rows (d x s f64, row-major); f64 running total if flags bit 0
//     L1      rows; t u32; t x (index u64, value f64)
//     L2      rows; load row (s x f64)
//     DYADIC  L u16; root total f64; for level 1..L either 2^level f64
//             (levels with 2^level <= s) or d x s f64
//
// Hash functions are never stored: they are re-derived from master_seed.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biask/any_sketch.hpp"

namespace biask {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 42;
inline constexpr std::uint8_t kFlagRunningTotal = 0x01;

std::vector<std::uint8_t> serialize(const AnySketch& sk);
AnySketch deserialize(std::span<const std::uint8_t> bytes);

/// Serialized size in 8-byte words, rounded up.
inline std::uint64_t words_for_bytes(std::size_t bytes) noexcept { return (bytes + 7) / 8; }
std::uint64_t sketch_words(const AnySketch& sk);

void sketch_save(const std::string& path, const AnySketch& sk);
AnySketch sketch_load(const std::string& path);

}  // namespace biask
