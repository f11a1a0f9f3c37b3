#pragma once

// Point queries under single-coordinate updates. Both structures answer with
// the same arithmetic as the batch recoveries on the prefix vector, so for
// exactly representable updates the answers agree bitwise.

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "biask/bias_heap.hpp"
#include "biask/bias_recovery.hpp"
#include "biask/sketch.hpp"

namespace biask {

class StreamingL2 {
 public:
  StreamingL2(std::uint64_t n, const SketchConfig& cfg, SeedSet seeds);

  void update(std::uint64_t i, double delta);
  double bias() const noexcept { return heap_.query(); }
  double point(std::uint64_t i) const;

  const PlainSketch& rows() const noexcept { return cs_; }
  const BiasHeap& heap() const noexcept { return heap_; }
  const BucketLoads& loads() const noexcept { return loads_; }
  std::uint64_t dimension() const noexcept { return cs_.dimension(); }

 private:
  BucketLoads loads_;
  PlainSketch cs_;
  std::vector<std::int64_t> node_of_bucket_;  // -1 for empty buckets
  BiasHeap heap_;
};

class StreamingL1 {
 public:
  StreamingL1(std::uint64_t n, const SketchConfig& cfg, SeedSet seeds);
  ~StreamingL1();
  StreamingL1(StreamingL1&&) noexcept;
  StreamingL1& operator=(StreamingL1&&) noexcept;

  void update(std::uint64_t i, double delta);
  /// Median of the tracked sample values.
  double bias() const;
  double point(std::uint64_t i) const;

  const PlainSketch& rows() const noexcept { return cm_; }
  std::span<const std::uint64_t> sample_positions() const noexcept { return positions_; }
  std::span<const double> sample_values() const noexcept { return values_; }
  std::uint64_t dimension() const noexcept { return cm_.dimension(); }

 private:
  struct OrderedSamples;

  PlainSketch cm_;
  BucketLoads loads_;
  std::vector<std::uint64_t> positions_;
  std::vector<double> values_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> slots_of_;
  std::unique_ptr<OrderedSamples> ordered_;
};

}  // namespace biask
