#include "biask/bias_heap.hpp"

#include <cmath>

#include "biask/error.hpp"

namespace biask {

BiasHeap::Heap::Heap(bool min_heap, std::size_t capacity)
    : min_heap_(min_heap), pos_(capacity, -1) {
  items_.reserve(capacity);
}

template <class Less>
void BiasHeap::Heap::sift_up(std::size_t i, const Less& less) {
  const std::uint32_t id = items_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!before(id, items_[parent], less)) break;
    place(i, items_[parent]);
    i = parent;
  }
  place(i, id);
}

template <class Less>
void BiasHeap::Heap::sift_down(std::size_t i, const Less& less) {
  const std::uint32_t id = items_[i];
  const std::size_t n = items_.size();
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && before(items_[child + 1], items_[child], less)) ++child;
    if (!before(items_[child], id, less)) break;
    place(i, items_[child]);
    i = child;
  }
  place(i, id);
}

template <class Less>
void BiasHeap::Heap::push(std::uint32_t id, const Less& less) {
  items_.push_back(id);
  pos_[id] = static_cast<std::int64_t>(items_.size() - 1);
  sift_up(items_.size() - 1, less);
}

template <class Less>
void BiasHeap::Heap::fix(std::uint32_t id, const Less& less) {
  const auto i = static_cast<std::size_t>(pos_[id]);
  sift_up(i, less);
  sift_down(static_cast<std::size_t>(pos_[id]), less);
}

template <class Less>
void BiasHeap::Heap::replace_top(std::uint32_t id, const Less& less) {
  pos_[items_.front()] = -1;
  place(0, id);
  sift_down(0, less);
}

template <class Less>
bool BiasHeap::Heap::valid(const Less& less) const {
  for (std::size_t i = 1; i < items_.size(); ++i) {
    if (before(items_[i], items_[(i - 1) / 2], less)) return false;
  }
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (pos_[items_[i]] != static_cast<std::int64_t>(i)) return false;
  }
  return true;
}

BiasHeap::BiasHeap(std::span<const double> loads)
    : BiasHeap(loads, [&] {
        if (loads.size() < 8) {
          raise(Errc::config, "Bias-Heap with default half-width needs at least 8 buckets");
        }
        return static_cast<std::uint32_t>(loads.size() / 4);
      }()) {}

BiasHeap::BiasHeap(std::span<const double> loads, std::uint32_t k)
    : k_(k), w_(loads.size(), 0.0), pi_(loads.begin(), loads.end()) {
  const std::size_t n = loads.size();
  if (k == 0) raise(Errc::config, "Bias-Heap half-width must be positive");
  if (n < 4 * std::size_t{k}) {
    raise(Errc::insufficient_buckets,
          "Bias-Heap needs at least 4k = " + std::to_string(4 * std::size_t{k}) +
              " tracked buckets, got " + std::to_string(n));
  }
  for (double p : pi_) {
    if (!(p > 0.0)) raise(Errc::config, "Bias-Heap tracks only buckets with positive load");
    total_pi_ += p;
  }
  const std::size_t mid = n / 2;
  const std::size_t bottom = mid - k;     // |C|
  const std::size_t top = n - mid - k;    // |A|
  a_ = Heap(true, n);
  b_ = Heap(false, n);
  c_ = Heap(false, n);
  d_ = Heap(true, n);
  // All keys start at 0, so rank order is node order.
  const auto less = [this](std::uint32_t x, std::uint32_t y) { return key_less(x, y); };
  for (std::uint32_t id = 0; id < n; ++id) {
    if (id >= n - top) {
      a_.push(id, less);
      pi_a_ += pi_[id];
    } else {
      b_.push(id, less);
    }
    if (id < bottom) {
      c_.push(id, less);
      pi_c_ += pi_[id];
    } else {
      d_.push(id, less);
    }
  }
  comparisons_ = 0;
}

bool BiasHeap::key_less(std::uint32_t a, std::uint32_t b) const noexcept {
  ++comparisons_;
  const double ka = w_[a] / pi_[a];
  const double kb = w_[b] / pi_[b];
  if (ka < kb) return true;
  if (kb < ka) return false;
  return a < b;
}

void BiasHeap::update(std::uint32_t node, double delta) {
  check_index(node, w_.size(), "bias_heap_update");
  const auto less = [this](std::uint32_t x, std::uint32_t y) { return key_less(x, y); };
  w_[node] += delta;
  total_w_ += delta;
  if (a_.contains(node)) {
    w_a_ += delta;
    a_.fix(node, less);
  } else {
    b_.fix(node, less);
  }
  if (c_.contains(node)) {
    w_c_ += delta;
    c_.fix(node, less);
  } else {
    d_.fix(node, less);
  }
  rebalance();
}

void BiasHeap::rebalance() {
  const auto less = [this](std::uint32_t x, std::uint32_t y) { return key_less(x, y); };
  // A keeps the largest keys: its minimum must not fall below B's maximum.
  while (!a_.empty() && !b_.empty() && key_less(a_.top(), b_.top())) {
    const std::uint32_t ta = a_.top();
    const std::uint32_t tb = b_.top();
    a_.replace_top(tb, less);
    b_.replace_top(ta, less);
    w_a_ += w_[tb];
    w_a_ -= w_[ta];
    pi_a_ += pi_[tb];
    pi_a_ -= pi_[ta];
  }
  // C keeps the smallest keys: its maximum must not exceed D's minimum.
  while (!c_.empty() && !d_.empty() && key_less(d_.top(), c_.top())) {
    const std::uint32_t tc = c_.top();
    const std::uint32_t td = d_.top();
    c_.replace_top(td, less);
    d_.replace_top(tc, less);
    w_c_ += w_[td];
    w_c_ -= w_[tc];
    pi_c_ += pi_[td];
    pi_c_ -= pi_[tc];
  }
}

BiasHeap::Audit BiasHeap::audit(double tol) const {
  const auto fail = [](std::string what) { return Audit{false, std::move(what)}; };
  const std::size_t n = w_.size();
  const std::size_t mid = n / 2;
  if (a_.size() != n - mid - k_) return fail("top group has the wrong size");
  if (c_.size() != mid - k_) return fail("bottom group has the wrong size");
  for (std::uint32_t id = 0; id < n; ++id) {
    if (a_.contains(id) == b_.contains(id)) return fail("node not in exactly one of A, B");
    if (c_.contains(id) == d_.contains(id)) return fail("node not in exactly one of C, D");
  }
  const auto less = [this](std::uint32_t x, std::uint32_t y) { return key_less(x, y); };
  if (!a_.valid(less) || !b_.valid(less) || !c_.valid(less) || !d_.valid(less)) {
    return fail("heap order violated");
  }
  if (!a_.empty() && !b_.empty() && key_less(a_.top(), b_.top())) {
    return fail("min key of A is below max key of B");
  }
  if (!c_.empty() && !d_.empty() && key_less(d_.top(), c_.top())) {
    return fail("max key of C is above min key of D");
  }
  double w = 0.0, wa = 0.0, wc = 0.0, pa = 0.0, pc = 0.0;
  for (std::uint32_t id = 0; id < n; ++id) {
    w += w_[id];
    if (a_.contains(id)) {
      wa += w_[id];
      pa += pi_[id];
    }
    if (c_.contains(id)) {
      wc += w_[id];
      pc += pi_[id];
    }
  }
  const auto close = [tol](double a, double b) {
    return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
  };
  if (!close(total_w_, w)) return fail("total w drifted");
  if (!close(w_a_, wa) || !close(pi_a_, pa)) return fail("A aggregates drifted");
  if (!close(w_c_, wc) || !close(pi_c_, pc)) return fail("C aggregates drifted");
  return {};
}

}  // namespace biask
