#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "biask/dyadic.hpp"
#include "support/errors.hpp"

using namespace biask;

namespace {

std::vector<std::uint64_t> indices_of(const std::vector<HeavyEntry>& hits) {
  std::vector<std::uint64_t> out;
  for (const auto& h : hits) out.push_back(h.index);
  return out;
}

double visit_bound(double l1, double theta, std::uint64_t n, std::uint64_t padded) {
  return std::min(10.0 * (l1 / theta) * std::log2(static_cast<double>(n)),
                  2.0 * static_cast<double>(padded));
}

}  // namespace

TEST_CASE("structure") {
  const auto cfg = SketchConfig::with_buckets(2, 4, 5);
  const DyadicSketch a(8, cfg, 1);
  CHECK(a.levels() == 3);
  CHECK(a.padded_dimension() == 8);
  CHECK(a.total() == 0.0);
  CHECK(a.level(1).is_exact());
  CHECK(a.level(2).is_exact());
  CHECK_FALSE(a.level(3).is_exact());
  CHECK(a.level(3).sketch->dimension() == 8);

  const DyadicSketch b(1000, cfg, 1);
  CHECK(b.padded_dimension() == 1024);
  CHECK(b.levels() == 10);
  CHECK(error_code([&] { DyadicSketch(0, cfg, 1); }) == Errc::config);
}

TEST_CASE("worked threshold example") {
  const std::vector<double> x{0, 0, 5, 0, 0, 0, 9, 1};
  const auto cfg = SketchConfig::with_buckets(2, 8, 5);
  const DyadicSketch sk = DyadicSketch::build(x, cfg, 3);
  const auto hits = sk.threshold_query(4.0);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0] == HeavyEntry{2, 5.0});
  CHECK(hits[1] == HeavyEntry{6, 9.0});
  CHECK(sk.threshold_query(16.0).empty());
  CHECK(error_code([&] { sk.threshold_query(0.0); }) == Errc::argument);
  CHECK(error_code([&] { sk.threshold_query(-1.0); }) == Errc::argument);
}

TEST_CASE("updates along the path and root total") {
  const std::uint64_t n = 5000;
  const auto cfg = SketchConfig::with_buckets(4, 16, 5);
  DyadicSketch sk(n, cfg, 9);
  sk.update(1234, 5.0);
  for (std::uint32_t l = 1; l <= sk.levels(); ++l) {
    const std::uint64_t block = 1234 >> (sk.levels() - l);
    CHECK(sk.estimate(l, block) >= 5.0);
  }
  for (int t = 0; t < 99; ++t) sk.update(static_cast<std::uint64_t>(t) * 50, 1.0);
  CHECK(sk.total() == 104.0);
  CHECK(error_code([&] { sk.update(n, 1.0); }) == Errc::index);
  CHECK_FALSE(sk.saw_negative());
  sk.update(0, -1.0);
  CHECK(sk.saw_negative());
}

TEST_CASE("exact levels mirror block sums") {
  const std::uint64_t n = 64;
  const auto cfg = SketchConfig::with_buckets(4, 16, 5);
  DyadicSketch sk(n, cfg, 2);
  std::vector<double> x(n, 0.0);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  std::uniform_int_distribution<int> delta(0, 9);
  for (int t = 0; t < 3000; ++t) {
    const auto j = pick(rng);
    const double v = delta(rng);
    x[j] += v;
    sk.update(j, v);
  }
  for (std::uint32_t l = 1; l <= sk.levels(); ++l) {
    const auto& lv = sk.level(l);
    const std::uint64_t width = n >> l;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << l); ++b) {
      double sum = 0.0;
      for (std::uint64_t j = b * width; j < (b + 1) * width; ++j) sum += x[j];
      if (lv.is_exact()) {
        CHECK(lv.exact[b] == sum);
      } else {
        CHECK(sk.estimate(l, b) >= sum);
      }
    }
  }
  CHECK(sk == DyadicSketch::build(x, cfg, 2));
}

TEST_CASE("planted heavy coordinates are all reported") {
  const std::uint64_t n = 10000, k = 100;
  const auto cfg = SketchConfig::from_multiplier(k, 8.0, 5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> floor(0.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = floor(rng);
    std::vector<std::uint64_t> heavy;
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    while (heavy.size() < k) {
      const auto j = pick(rng);
      if (x[j] >= 1000.0) continue;
      x[j] = 1000.0;
      heavy.push_back(j);
    }
    std::sort(heavy.begin(), heavy.end());
    const DyadicSketch sk = DyadicSketch::build(x, cfg, 100 + seed);
    DyadicQueryStats stats;
    const auto got = indices_of(sk.threshold_query(500.0, &stats));
    CHECK(std::includes(got.begin(), got.end(), heavy.begin(), heavy.end()));
    double l1 = 0.0;
    for (double v : x) l1 += v;
    CHECK(static_cast<double>(stats.visited) <= visit_bound(l1, 500.0, n, sk.padded_dimension()));
    for (auto j : got) CHECK(j < n);
  }
}

TEST_CASE("padding coordinates are never reported") {
  const std::uint64_t n = 1000;
  const auto cfg = SketchConfig::with_buckets(2, 4, 3);
  std::vector<double> x(n, 3.0);
  const DyadicSketch sk = DyadicSketch::build(x, cfg, 4);
  const auto got = indices_of(sk.threshold_query(1.0));
  CHECK(got.size() == n);
  CHECK(std::all_of(got.begin(), got.end(), [&](std::uint64_t j) { return j < n; }));
}

TEST_CASE("merge adds block sums") {
  const std::uint64_t n = 300;
  const auto cfg = SketchConfig::with_buckets(3, 16, 5);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> v(0, 20);
  std::vector<double> x(n), y(n), xy(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    x[j] = v(rng);
    y[j] = v(rng);
    xy[j] = x[j] + y[j];
  }
  DyadicSketch a = DyadicSketch::build(x, cfg, 5);
  a.add_scaled(DyadicSketch::build(y, cfg, 5), 1.0);
  CHECK(a == DyadicSketch::build(xy, cfg, 5));
  CHECK(error_code([&] { a.add_scaled(DyadicSketch::build(y, cfg, 6), 1.0); }) ==
        Errc::incompatible);
}
