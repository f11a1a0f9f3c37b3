#pragma once

#include <cstdint>
#include <variant>

#include "biask/bias_recovery.hpp"
#include "biask/dyadic.hpp"
#include "biask/sketch.hpp"

namespace biask {

/// Tag values double as the `kind` byte of the file header.
enum class FileKind : std::uint8_t { cm = 0, cs = 1, l1 = 2, l2 = 3, dyadic = 4 };

const char* file_kind_name(FileKind kind) noexcept;

using AnySketch = std::variant<PlainSketch, L1Sketch, L2Sketch, DyadicSketch>;

FileKind kind_of(const AnySketch& sk) noexcept;
std::uint64_t dimension_of(const AnySketch& sk) noexcept;
const SketchConfig& config_of(const AnySketch& sk) noexcept;
std::uint64_t master_seed_of(const AnySketch& sk) noexcept;

void update(AnySketch& sk, std::uint64_t j, double delta);
/// sk += alpha * other; throws Errc::incompatible on kind/shape/seed mismatch.
void add_scaled(AnySketch& sk, const AnySketch& other, double alpha);
AnySketch merge(const AnySketch& a, const AnySketch& b);

}  // namespace biask
