#include "biask/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "biask/error.hpp"

namespace biask {

TailError tail_error(std::span<const double> x, std::uint64_t k, Norm p) {
  TailError out{0.0, p, k};
  if (k >= x.size()) return out;
  std::vector<double> mag(x.size());
  std::transform(x.begin(), x.end(), mag.begin(), [](double v) { return std::fabs(v); });
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double acc = 0.0;
  if (p == Norm::l1) {
    for (std::size_t i = k; i < mag.size(); ++i) acc += mag[i];
    out.value = acc;
  } else {
    for (std::size_t i = k; i < mag.size(); ++i) acc += mag[i] * mag[i];
    out.value = std::sqrt(acc);
  }
  return out;
}

double shifted_tail_error(std::span<const double> x, double beta, std::uint64_t k, Norm p) {
  std::vector<double> shifted(x.size());
  std::transform(x.begin(), x.end(), shifted.begin(), [beta](double v) { return v - beta; });
  return tail_error(shifted, k, p).value;
}

namespace {

void check_drop_count(std::size_t n, std::uint64_t k) {
  if (k >= n) {
    raise(Errc::degenerate, "best bias needs k < n (k = " + std::to_string(k) +
                                ", n = " + std::to_string(n) + ")");
  }
}

/// Sorted copy of x, shifted by its middle element to limit cancellation in
/// prefix sums. The shift is exact for integer-valued inputs.
struct CenteredSorted {
  std::vector<double> y;
  double center = 0.0;
  std::vector<double> p1;  // prefix sums of y
  std::vector<double> p2;  // prefix sums of y^2

  explicit CenteredSorted(std::span<const double> x) : y(x.begin(), x.end()) {
    std::sort(y.begin(), y.end());
    center = y[y.size() / 2];
    for (double& v : y) v -= center;
    p1.assign(y.size() + 1, 0.0);
    p2.assign(y.size() + 1, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      p1[i + 1] = p1[i] + y[i];
      p2[i + 1] = p2[i] + y[i] * y[i];
    }
  }

  double sum(std::size_t lo, std::size_t hi) const { return p1[hi] - p1[lo]; }
  double sum_sq(std::size_t lo, std::size_t hi) const { return p2[hi] - p2[lo]; }

  /// Sum of |y_i - beta| over the sorted range [lo, hi).
  double abs_dev(std::size_t lo, std::size_t hi, double beta) const {
    if (lo >= hi) return 0.0;
    const auto first = y.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto last = y.begin() + static_cast<std::ptrdiff_t>(hi);
    const std::size_t split = static_cast<std::size_t>(std::lower_bound(first, last, beta) - y.begin());
    const double below = beta * static_cast<double>(split - lo) - sum(lo, split);
    const double above = sum(split, hi) - beta * static_cast<double>(hi - split);
    return below + above;
  }

  /// Err_1^k(y - beta): drop the k largest deviations, which sit at the ends.
  double l1_tail(double beta, std::uint64_t k) const {
    std::size_t lo = 0, hi = y.size();
    for (std::uint64_t dropped = 0; dropped < k && lo < hi; ++dropped) {
      if (beta - y[lo] >= y[hi - 1] - beta) {
        ++lo;
      } else {
        --hi;
      }
    }
    return abs_dev(lo, hi, beta);
  }

  double median(std::size_t lo, std::size_t hi) const {
    const std::size_t m = hi - lo;
    if (m % 2 == 1) return y[lo + m / 2];
    return (y[lo + m / 2 - 1] + y[lo + m / 2]) / 2.0;
  }
};

/// Start of the first minimum-SSE window of length n - k, and its SSE.
std::pair<std::size_t, double> min_sse_window(const CenteredSorted& cs, std::uint64_t k) {
  const std::size_t n = cs.y.size();
  const std::size_t m = n - k;
  std::size_t best_start = 0;
  double best_sse = 0.0;
  for (std::size_t a = 0; a <= k; ++a) {
    const double s1 = cs.sum(a, a + m);
    const double sse = std::max(0.0, cs.sum_sq(a, a + m) - s1 * s1 / static_cast<double>(m));
    if (a == 0 || sse < best_sse) {
      best_sse = sse;
      best_start = a;
    }
  }
  return {best_start, best_sse};
}

}  // namespace

BestBias best_bias_l1(std::span<const double> x, std::uint64_t k) {
  check_drop_count(x.size(), k);
  const CenteredSorted cs(x);
  const std::size_t n = x.size();
  BestBias best;
  for (std::uint64_t j = 0; j <= k; ++j) {
    const double beta = cs.median(j, n - (k - j));
    const double err = cs.l1_tail(beta, k);
    if (j == 0 || err < best.err) best = BestBias{beta, err};
  }
  best.beta += cs.center;
  return best;
}

BestBias best_bias_l2(std::span<const double> x, std::uint64_t k) {
  check_drop_count(x.size(), k);
  const CenteredSorted cs(x);
  const std::size_t m = x.size() - k;
  const auto [start, sse] = min_sse_window(cs, k);
  return BestBias{cs.sum(start, start + m) / static_cast<double>(m) + cs.center,
                  std::sqrt(sse)};
}

std::vector<std::uint64_t> min_variance_window(std::span<const double> x, std::uint64_t k) {
  check_drop_count(x.size(), k);
  const CenteredSorted cs(x);
  const std::size_t m = x.size() - k;
  const std::size_t start = min_sse_window(cs, k).first;

  std::vector<std::uint64_t> order(x.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return x[a] < x[b]; });
  std::vector<std::uint64_t> kept(order.begin() + static_cast<std::ptrdiff_t>(start),
                                  order.begin() + static_cast<std::ptrdiff_t>(start + m));
  std::sort(kept.begin(), kept.end());
  return kept;
}

BestBias best_bias(std::span<const double> x, std::uint64_t k, Norm p) {
  return p == Norm::l1 ? best_bias_l1(x, k) : best_bias_l2(x, k);
}

}  // namespace biask
