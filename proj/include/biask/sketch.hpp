#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "biask/hashing.hpp"

namespace biask {

/// Sparsity target k, bucket count s and row count d. `c_s` is kept alongside
/// s because the file header records both.
struct SketchConfig {
  std::uint32_t k = 1;
  double c_s = 4.0;
  std::uint32_t d = 9;
  std::uint32_t s = 4;

  /// s = ceil(c_s * k).
  static SketchConfig from_multiplier(std::uint32_t k, double c_s, std::uint32_t d);
  /// Explicit s; c_s becomes s / k.
  static SketchConfig with_buckets(std::uint32_t k, std::uint32_t s, std::uint32_t d);

  /// k, s, d positive.
  void validate() const;
  /// Additionally s >= 4k, which the middle-2k bias window needs.
  void validate_bias_window() const;

  friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

inline constexpr std::uint32_t kDefaultBaselineDepth = 10;
inline constexpr std::uint32_t kDefaultBiasDepth = 9;

/// Median with the even-length convention (x_{m/2} + x_{m/2+1}) / 2.
/// Reorders `values`.
double median_inplace(std::span<double> values);
double median_of(std::span<const double> values);

/// Median of value(0), ..., value(d - 1) without heap allocation for small d.
template <class Fn>
double median_over_rows(std::uint32_t d, Fn&& value) {
  constexpr std::uint32_t kInline = 64;
  if (d <= kInline) {
    std::array<double, kInline> buf;
    for (std::uint32_t i = 0; i < d; ++i) buf[i] = value(i);
    return median_inplace(std::span<double>(buf.data(), d));
  }
  std::vector<double> buf(d);
  for (std::uint32_t i = 0; i < d; ++i) buf[i] = value(i);
  return median_inplace(buf);
}

enum class SketchKind : std::uint8_t { cm = 0, cs = 1 };

enum class Estimator : std::uint8_t { count_median, count_sketch, count_min };

/// Row i holds Pi(h^i) x (CM) or Psi(h^i, r^i) x (CS), computed without ever
/// materialising the matrices.
class PlainSketch {
 public:
  PlainSketch(SketchKind kind, const SketchConfig& cfg, SeedSet seeds);

  static PlainSketch apply(std::span<const double> x, SketchKind kind,
                           const SketchConfig& cfg, const SeedSet& seeds);

  void update(std::uint64_t j, double delta);
  /// this += alpha * other. Requires compatible shape and seeds.
  void add_scaled(const PlainSketch& other, double alpha);
  void check_compatible(const PlainSketch& other) const;

  double count_median(std::uint64_t j) const;
  double count_sketch(std::uint64_t j) const;
  /// One-sided only for nonnegative inputs; returned regardless of sign.
  double count_min(std::uint64_t j) const;
  double point(Estimator estimator, std::uint64_t j) const;
  std::vector<double> recover_all(Estimator estimator) const;

  SketchKind kind() const noexcept { return kind_; }
  const SketchConfig& config() const noexcept { return cfg_; }
  const SeedSet& seeds() const noexcept { return seeds_; }
  std::uint64_t dimension() const noexcept { return seeds_.n; }
  std::uint32_t buckets() const noexcept { return cfg_.s; }
  std::uint32_t depth() const noexcept { return cfg_.d; }

  std::span<const double> cells() const noexcept { return rows_; }
  std::span<double> mutable_cells() noexcept { return rows_; }
  std::span<const double> row(std::uint32_t i) const noexcept {
    return std::span<const double>(rows_).subspan(std::size_t{i} * cfg_.s, cfg_.s);
  }
  double cell(std::uint32_t i, std::uint64_t b) const noexcept {
    return rows_[std::size_t{i} * cfg_.s + b];
  }

  std::uint64_t bucket_of(std::uint32_t i, std::uint64_t j) const noexcept {
    return seeds_.hashes[i].bucket_unchecked(j);
  }
  int sign_of(std::uint32_t i, std::uint64_t j) const noexcept {
    return kind_ == SketchKind::cs ? seeds_.signs[i].sign_unchecked(j) : 1;
  }

  /// Running sum of all updates (sum of x). Kept for the mean-bias baselines.
  double total() const noexcept { return total_; }
  void set_total(double total) noexcept { total_ = total; }

  /// Whether the running sum is part of the serialized sketch.
  bool tracks_total() const noexcept { return tracks_total_; }
  void set_tracks_total(bool on) noexcept { tracks_total_ = on; }

  /// The running sum only takes part when it is tracked.
  friend bool operator==(const PlainSketch& a, const PlainSketch& b) {
    return a.kind_ == b.kind_ && a.cfg_ == b.cfg_ && a.seeds_ == b.seeds_ &&
           a.rows_ == b.rows_ && a.tracks_total_ == b.tracks_total_ &&
           (!a.tracks_total_ || a.total_ == b.total_);
  }

 private:
  SketchKind kind_;
  SketchConfig cfg_;
  SeedSet seeds_;
  std::vector<double> rows_;
  double total_ = 0.0;
  bool tracks_total_ = false;
};

PlainSketch sketch_apply(std::span<const double> x, SketchKind kind,
                         const SketchConfig& cfg, const SeedSet& seeds);
PlainSketch sketch_merge(const PlainSketch& a, const PlainSketch& b);

}  // namespace biask
