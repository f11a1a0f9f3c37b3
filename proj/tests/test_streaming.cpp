#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "biask/bias_recovery.hpp"
#include "biask/sketch.hpp"
#include "biask/streaming.hpp"
#include "support/errors.hpp"

using namespace biask;

TEST_CASE("one update is recovered exactly") {
  const std::uint64_t n = 1000;
  const auto cfg = SketchConfig::with_buckets(4, 64, 9);
  StreamingL2 s2(n, cfg, derive_seed_set(1, n, cfg.s, cfg.d, true));
  StreamingL1 s1(n, cfg, derive_seed_set(1, n, cfg.s, cfg.d, false));
  s2.update(17, 7.0);
  s1.update(17, 7.0);
  CHECK(s2.point(17) == 7.0);
  CHECK(s1.point(17) == 7.0);
  CHECK(error_code([&] { s2.update(n, 1.0); }) == Errc::index);
  CHECK(error_code([&] { s1.point(n); }) == Errc::index);
  CHECK(error_code([&] {
          StreamingL2(n, cfg, derive_seed_set(1, n, cfg.s, cfg.d, false));
        }) == Errc::config);
}

TEST_CASE("stream point queries equal batch recovery of the prefix") {
  const std::uint64_t n = 2000;
  const auto cfg = SketchConfig::with_buckets(8, 64, 9);
  const SeedSet s1 = derive_seed_set(11, n, cfg.s, cfg.d, false);
  const SeedSet s2 = derive_seed_set(11, n, cfg.s, cfg.d, true);
  StreamingL1 st1(n, cfg, s1);
  StreamingL2 st2(n, cfg, s2);
  std::vector<double> x(n, 0.0);
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  std::uniform_int_distribution<int> delta(-5, 20);
  for (int t = 1; t <= 20000; ++t) {
    const auto j = pick(rng);
    const double v = delta(rng);
    x[j] += v;
    st1.update(j, v);
    st2.update(j, v);
    if (t % 200 == 0) {
      const L1Sketch b1 = L1Sketch::build(x, cfg, s1);
      const L2Sketch b2 = L2Sketch::build(x, cfg, s2);
      const BucketLoads loads = compute_bucket_loads(s2, cfg, n);
      REQUIRE(st1.bias() == b1.estimate_bias());
      REQUIRE(st2.bias() == b2.estimate_bias(loads));
      for (int q = 0; q < 10; ++q) {
        const auto i = pick(rng);
        REQUIRE(st1.point(i) == b1.point(i));
        REQUIRE(st2.point(i) == b2.point(loads, i));
      }
      REQUIRE(st1.rows() == b1.cm());
      REQUIRE(st2.rows() == b2.cs());
    }
  }
}

TEST_CASE("constant shift stream") {
  const std::uint64_t n = 3000;
  const auto cfg = SketchConfig::with_buckets(10, 40, 9);
  StreamingL2 st(n, cfg, derive_seed_set(4, n, cfg.s, cfg.d, true));
  for (std::uint64_t j = 1; j < n; ++j) st.update(j, 25.0);
  CHECK(st.bias() == 25.0);
  const std::vector<double> x = [&] {
    std::vector<double> v(n, 25.0);
    v[0] = 0.0;
    return v;
  }();
  const L2Sketch b = L2Sketch::build(x, cfg, derive_seed_set(4, n, cfg.s, cfg.d, true));
  CHECK(st.point(0) == b.point(0));
  CHECK(std::abs(st.point(0)) <= 25.0);
}

TEST_CASE("untouched samples keep the bias at zero") {
  const std::uint64_t n = 5000;
  const auto cfg = SketchConfig::with_buckets(4, 32, 9);
  StreamingL1 st(n, cfg, derive_seed_set(6, n, cfg.s, cfg.d, false));
  const std::set<std::uint64_t> sampled(st.sample_positions().begin(),
                                        st.sample_positions().end());
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  int applied = 0;
  while (applied < 5000) {
    const auto j = pick(rng);
    if (sampled.count(j)) continue;
    st.update(j, 3.0);
    ++applied;
  }
  CHECK(st.bias() == 0.0);
}

TEST_CASE("duplicate samples move together") {
  const std::uint64_t n = 4;
  const auto cfg = SketchConfig::with_buckets(1, 4, 3);
  const SeedSet seeds = derive_seed_set(8, n, cfg.s, cfg.d, false);
  StreamingL1 st(n, cfg, seeds);
  REQUIRE(st.sample_positions().size() == 41);
  std::vector<int> mult(n, 0);
  for (auto p : st.sample_positions()) ++mult[p];
  CHECK(*std::max_element(mult.begin(), mult.end()) > 1);

  std::vector<double> x(n, 0.0);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  std::uniform_int_distribution<int> delta(-10, 10);
  for (int t = 0; t < 500; ++t) {
    const auto j = pick(rng);
    const double v = delta(rng);
    x[j] += v;
    st.update(j, v);
    std::vector<double> want;
    for (auto p : st.sample_positions()) want.push_back(x[p]);
    for (std::size_t q = 0; q < want.size(); ++q) REQUIRE(st.sample_values()[q] == want[q]);
    REQUIRE(st.bias() == median_of(want));
  }
}
