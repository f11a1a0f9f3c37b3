#pragma once

// Dyadic-interval threshold recovery for nonnegative streams. Level l holds
// the 2^l block sums of x (blocks of length n_padded / 2^l). Levels small
// enough to fit in s words are stored exactly; the rest are Count-Min
// sketches with their own seeds. A threshold query descends from the root,
// expanding a node only if its estimate reaches theta.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "biask/sketch.hpp"

namespace biask {

struct HeavyEntry {
  std::uint64_t index = 0;
  double estimate = 0.0;

  friend bool operator==(const HeavyEntry&, const HeavyEntry&) = default;
};

struct DyadicQueryStats {
  std::uint64_t visited = 0;  // nodes whose estimate was evaluated, root included
};

class DyadicSketch {
 public:
  struct Level {
    std::uint32_t level = 0;
    std::vector<double> exact;          // 2^level entries when stored exactly
    std::optional<PlainSketch> sketch;  // CM sketch otherwise

    bool is_exact() const noexcept { return !sketch.has_value(); }
    friend bool operator==(const Level&, const Level&) = default;
  };

  DyadicSketch(std::uint64_t n, const SketchConfig& cfg, std::uint64_t master_seed);

  static DyadicSketch build(std::span<const double> x, const SketchConfig& cfg,
                            std::uint64_t master_seed);

  /// Negative deltas are accepted but void the no-false-negative contract.
  void update(std::uint64_t i, double delta);
  void add_scaled(const DyadicSketch& other, double alpha);

  std::vector<HeavyEntry> threshold_query(double theta, DyadicQueryStats* stats = nullptr) const;

  /// Estimate of block j at `level` (level 0 is the root total).
  double estimate(std::uint32_t level, std::uint64_t j) const;

  std::uint64_t dimension() const noexcept { return n_; }
  std::uint64_t padded_dimension() const noexcept { return n_padded_; }
  std::uint32_t levels() const noexcept { return depth_; }
  double total() const noexcept { return total_; }
  const SketchConfig& config() const noexcept { return cfg_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const Level& level(std::uint32_t l) const { return levels_.at(l - 1); }
  Level& mutable_level(std::uint32_t l) { return levels_.at(l - 1); }
  void set_total(double total) noexcept { total_ = total; }
  /// True if any update so far had a negative delta.
  bool saw_negative() const noexcept { return saw_negative_; }
  void mark_negative() noexcept { saw_negative_ = true; }

  friend bool operator==(const DyadicSketch&, const DyadicSketch&) = default;

 private:
  std::uint64_t n_ = 0;
  std::uint64_t n_padded_ = 1;
  std::uint32_t depth_ = 0;
  SketchConfig cfg_;
  std::uint64_t master_seed_ = 0;
  double total_ = 0.0;
  bool saw_negative_ = false;
  std::vector<Level> levels_;
};

/// Seeds used by level `level` (its domain is 2^level).
SeedSet dyadic_level_seeds(std::uint64_t master_seed, std::uint32_t level,
                           const SketchConfig& cfg);

}  // namespace biask
