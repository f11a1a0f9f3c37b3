#pragma once

// Exhaustive reference computations and data helpers shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace brute {

/// Calls fn(kept) for every subset of [0, n) of size n - k.
inline void for_each_kept(std::size_t n, std::size_t k,
                          const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<bool> drop(n, false);
  std::fill(drop.end() - static_cast<std::ptrdiff_t>(k), drop.end(), true);
  std::vector<std::size_t> kept;
  do {
    kept.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (!drop[i]) kept.push_back(i);
    }
    fn(kept);
  } while (std::next_permutation(drop.begin(), drop.end()));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
}

/// min over kept sets R of sum_{i in R} |x_i - median(R)|.
inline double best_l1_err(std::span<const double> x, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  for_each_kept(x.size(), k, [&](const std::vector<std::size_t>& kept) {
    std::vector<double> v;
    for (std::size_t i : kept) v.push_back(x[i]);
    const double med = median(v);
    double err = 0.0;
    for (double y : v) err += std::abs(y - med);
    best = std::min(best, err);
  });
  return best;
}

/// m * sum y^2 - (sum y)^2 over the kept values; exact for small integers.
inline std::int64_t scaled_sse(std::span<const double> x, std::span<const std::size_t> kept) {
  std::int64_t s1 = 0, s2 = 0;
  for (std::size_t i : kept) {
    const auto v = static_cast<std::int64_t>(x[i]);
    s1 += v;
    s2 += v * v;
  }
  return static_cast<std::int64_t>(kept.size()) * s2 - s1 * s1;
}

inline std::int64_t best_l2_scaled_sse(std::span<const double> x, std::size_t k) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for_each_kept(x.size(), k, [&](const std::vector<std::size_t>& kept) {
    best = std::min(best, scaled_sse(x, kept));
  });
  return best;
}

inline std::vector<double> random_ints(std::mt19937_64& rng, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

/// beta everywhere plus k spikes of magnitude in [lo, hi] with random signs,
/// at distinct random positions. Spike values are integers.
inline std::vector<double> biased_sparse(std::uint64_t n, double beta, std::uint64_t k,
                                         int lo, int hi, std::uint64_t seed,
                                         std::vector<std::uint64_t>* where = nullptr) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(n, beta);
  std::vector<std::uint64_t> idx(n);
  for (std::uint64_t i = 0; i < n; ++i) idx[i] = i;
  std::uniform_int_distribution<int> mag(lo, hi);
  std::bernoulli_distribution neg(0.5);
  for (std::uint64_t t = 0; t < k; ++t) {
    std::uniform_int_distribution<std::uint64_t> pick(t, n - 1);
    std::swap(idx[t], idx[pick(rng)]);
    x[idx[t]] += neg(rng) ? -mag(rng) : mag(rng);
  }
  if (where) where->assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  return x;
}

inline std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace brute
