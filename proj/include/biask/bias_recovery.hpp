#pragma once

// Bias-aware sketch/recover pairs.
//
// l1: a CM sketch plus t sampled coordinates. The sample median estimates the
//     bias, the CM rows are de-biased with the per-row bucket loads and
//     Count-Median recovers the residual.
// l2: a CS sketch plus a load row w = Pi(g) x. The bias is the load-weighted
//     average of the middle 2k buckets ranked by w_b / pi_b, and Count-Sketch
//     recovers the residual after subtracting bias * psi from every row.
//
// Recovery and point queries share one arithmetic path per coordinate, so
// point(j) is bitwise equal to recover()[j].

#include <cstdint>
#include <span>
#include <vector>

#include "biask/hashing.hpp"
#include "biask/sketch.hpp"

namespace biask {

/// Column sums of the implicit matrices: pi for the load hash g, per-row
/// bucket sizes of h^i, and psi^i_b = sum of r^i(j) over h^i(j) = b.
struct BucketLoads {
  std::uint32_t s = 0;
  std::uint32_t d = 0;
  std::vector<std::uint64_t> pi;      // s entries; empty without a load hash
  std::vector<std::uint64_t> counts;  // d x s
  std::vector<std::int64_t> psi;      // d x s

  double count(std::uint32_t i, std::uint64_t b) const noexcept {
    return static_cast<double>(counts[std::size_t{i} * s + b]);
  }
  double signed_load(std::uint32_t i, std::uint64_t b) const noexcept {
    return static_cast<double>(psi[std::size_t{i} * s + b]);
  }
};

BucketLoads compute_bucket_loads(const SeedSet& seeds, const SketchConfig& cfg,
                                 std::uint64_t n);

/// Sample count for dimension n: the smallest odd integer >= 20 log2(n), and
/// 1 for n = 1.
std::uint32_t l1_sample_count(std::uint64_t n);

/// De-biased CM cell value y - beta * count.
inline double debias_cm(double cell, double count, double beta) noexcept {
  return cell - beta * count;
}
/// De-biased, sign-corrected CS cell value r * (y - beta * psi).
inline double debias_cs(double cell, double psi, int sign, double beta) noexcept {
  return sign * (cell - psi * beta);
}

class L1Sketch {
 public:
  L1Sketch(const SketchConfig& cfg, SeedSet seeds);

  static L1Sketch build(std::span<const double> x, const SketchConfig& cfg,
                        const SeedSet& seeds);

  void update(std::uint64_t j, double delta);
  void add_scaled(const L1Sketch& other, double alpha);

  /// Median of the sampled values.
  double estimate_bias() const;

  std::vector<double> recover(const BucketLoads& loads) const;
  std::vector<double> recover() const;
  double point(const BucketLoads& loads, std::uint64_t j) const;
  double point(std::uint64_t j) const;

  const PlainSketch& cm() const noexcept { return cm_; }
  PlainSketch& mutable_cm() noexcept { return cm_; }
  std::span<const std::uint64_t> sample_positions() const noexcept { return positions_; }
  std::span<const double> sample_values() const noexcept { return values_; }
  std::span<double> mutable_sample_values() noexcept { return values_; }
  const SketchConfig& config() const noexcept { return cm_.config(); }
  const SeedSet& seeds() const noexcept { return cm_.seeds(); }
  std::uint64_t dimension() const noexcept { return cm_.dimension(); }

  friend bool operator==(const L1Sketch&, const L1Sketch&) = default;

 private:
  PlainSketch cm_;
  std::vector<std::uint64_t> positions_;
  std::vector<double> values_;
};

/// Middle-2k load-weighted bias over the nonempty buckets (pi_b > 0), ranked by
/// w_b / pi_b ascending with ties broken by bucket index. With s' nonempty
/// buckets and m = floor(s' / 2) the window is ranks m - k .. m + k - 1.
double l2_estimate_bias(std::span<const double> w, std::span<const std::uint64_t> pi,
                        std::uint32_t k);

class L2Sketch {
 public:
  L2Sketch(const SketchConfig& cfg, SeedSet seeds);

  static L2Sketch build(std::span<const double> x, const SketchConfig& cfg,
                        const SeedSet& seeds);

  void update(std::uint64_t j, double delta);
  void add_scaled(const L2Sketch& other, double alpha);

  double estimate_bias(const BucketLoads& loads) const;

  std::vector<double> recover(const BucketLoads& loads) const;
  std::vector<double> recover() const;
  double point(const BucketLoads& loads, std::uint64_t j) const;
  double point(std::uint64_t j) const;

  const PlainSketch& cs() const noexcept { return cs_; }
  PlainSketch& mutable_cs() noexcept { return cs_; }
  std::span<const double> load_row() const noexcept { return load_row_; }
  std::span<double> mutable_load_row() noexcept { return load_row_; }
  const SketchConfig& config() const noexcept { return cs_.config(); }
  const SeedSet& seeds() const noexcept { return cs_.seeds(); }
  std::uint64_t dimension() const noexcept { return cs_.dimension(); }

  friend bool operator==(const L2Sketch&, const L2Sketch&) = default;

 private:
  PlainSketch cs_;
  std::vector<double> load_row_;
};

/// The l1-mean / l2-mean baselines: bias = running_sum / n, then the same
/// de-biased Count-Median (CM sketch) or Count-Sketch (CS sketch) recovery.
std::vector<double> mean_bias_recover(const PlainSketch& sk, double running_sum,
                                      std::uint64_t n, const BucketLoads& loads);
std::vector<double> mean_bias_recover(const PlainSketch& sk, double running_sum,
                                      std::uint64_t n);

}  // namespace biask
