#pragma once

// Bias-Heap: maintains the middle-2k window of buckets ranked by w_b / pi_b
// under single-bucket updates, answering the l2 bias estimate in O(1).
//
// Nodes are the s' tracked buckets. Two partitions are kept:
//   A | B  with A = the s' - m - k largest-ratio nodes (min-heap on key) and
//          B the rest (max-heap),
//   C | D  with C = the m - k smallest-ratio nodes (max-heap) and D the rest
//          (min-heap),
// where m = floor(s' / 2). The window is B intersect D, i.e. ranks
// m - k .. m + k - 1, matching l2_estimate_bias. Keys compare as
// (w_b / pi_b, node id), so the order is total and deterministic.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace biask {

class BiasHeap {
 public:
  /// Half-width k = s' / 4; requires s' >= 8.
  explicit BiasHeap(std::span<const double> loads);
  /// Explicit half-width; requires k >= 1 and s' >= 4k.
  BiasHeap(std::span<const double> loads, std::uint32_t k);

  void update(std::uint32_t node, double delta);

  /// (w - w_A - w_C) / (|pi|_1 - pi_A - pi_C).
  double query() const noexcept {
    return (total_w_ - w_a_ - w_c_) / (total_pi_ - pi_a_ - pi_c_);
  }

  struct Audit {
    bool ok = true;
    std::string failure;
  };
  /// Full structural check: group sizes, partitions, heap order, the
  /// cross-group order invariant and aggregate sums (to relative `tol`).
  Audit audit(double tol = 0.0) const;

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(w_.size()); }
  std::uint32_t half_width() const noexcept { return k_; }
  std::size_t top_group_size() const noexcept { return a_.size(); }
  std::size_t bottom_group_size() const noexcept { return c_.size(); }
  double value(std::uint32_t node) const { return w_.at(node); }
  double load(std::uint32_t node) const { return pi_.at(node); }
  std::uint64_t comparisons() const noexcept { return comparisons_; }

 private:
  class Heap {
   public:
    Heap() = default;
    Heap(bool min_heap, std::size_t capacity);

    bool empty() const noexcept { return items_.empty(); }
    std::size_t size() const noexcept { return items_.size(); }
    bool contains(std::uint32_t id) const noexcept { return pos_[id] >= 0; }
    std::uint32_t top() const noexcept { return items_.front(); }
    std::span<const std::uint32_t> items() const noexcept { return items_; }
    bool is_min_heap() const noexcept { return min_heap_; }

    template <class Less>
    void push(std::uint32_t id, const Less& less);
    template <class Less>
    void fix(std::uint32_t id, const Less& less);
    template <class Less>
    void replace_top(std::uint32_t id, const Less& less);
    template <class Less>
    bool valid(const Less& less) const;

   private:
    template <class Less>
    bool before(std::uint32_t a, std::uint32_t b, const Less& less) const {
      return min_heap_ ? less(a, b) : less(b, a);
    }
    template <class Less>
    void sift_up(std::size_t i, const Less& less);
    template <class Less>
    void sift_down(std::size_t i, const Less& less);
    void place(std::size_t i, std::uint32_t id) {
      items_[i] = id;
      pos_[id] = static_cast<std::int64_t>(i);
    }

    bool min_heap_ = true;
    std::vector<std::uint32_t> items_;
    std::vector<std::int64_t> pos_;
  };

  bool key_less(std::uint32_t a, std::uint32_t b) const noexcept;
  void rebalance();

  std::uint32_t k_ = 0;
  std::vector<double> w_;
  std::vector<double> pi_;
  Heap a_, b_, c_, d_;
  double total_w_ = 0.0, total_pi_ = 0.0;
  double w_a_ = 0.0, w_c_ = 0.0, pi_a_ = 0.0, pi_c_ = 0.0;
  mutable std::uint64_t comparisons_ = 0;
};

}  // namespace biask
