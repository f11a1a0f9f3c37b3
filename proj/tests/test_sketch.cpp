#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "biask/error.hpp"
#include "biask/oracles.hpp"
#include "biask/sketch.hpp"
#include "support/brute.hpp"

using namespace biask;

namespace {

SeedSet hand_seeds() {
  SeedSet s;
  s.master_seed = 0;
  s.n = 4;
  s.s = 2;
  s.d = 1;
  const std::array<std::uint64_t, 2> h{0, std::uint64_t{1} << 59};
  const std::array<std::uint64_t, 1> r{1};
  s.hashes.push_back(HashSpec::from_coefficients(4, 2, h));
  s.signs.push_back(SignSpec::from_coefficients(4, r));
  s.derived = false;
  return s;
}

std::vector<double> noisy_sparse(std::uint64_t n, std::uint64_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto x = brute::random_ints(rng, n, -100, 100);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  for (std::uint64_t t = 0; t < k; ++t) x[pick(rng)] += 1000.0;
  return x;
}

}  // namespace

TEST_CASE("config derivation and validation") {
  const auto c = SketchConfig::from_multiplier(10, 4.0, 9);
  CHECK(c.s == 40);
  CHECK(SketchConfig::from_multiplier(3, 4.5, 1).s == 14);
  CHECK_THROWS_AS(SketchConfig::from_multiplier(0, 4.0, 9), Error);
  CHECK_THROWS_AS(SketchConfig::with_buckets(4, 15, 9).validate_bias_window(), Error);
  CHECK_NOTHROW(SketchConfig::with_buckets(4, 16, 9).validate_bias_window());
}

TEST_CASE("median uses the two middle values for even counts") {
  const std::vector<double> odd{3, 1, 2};
  const std::vector<double> even{4, 1, 3, 2};
  CHECK(median_of(odd) == 2.0);
  CHECK(median_of(even) == 2.5);
  CHECK(median_over_rows(4, [](std::uint32_t i) { return double(i * i); }) == 2.5);
  CHECK_THROWS_AS(median_of(std::vector<double>{}), Error);
}

TEST_CASE("hand-fixed CM example") {
  const SeedSet seeds = hand_seeds();
  const auto cfg = SketchConfig::with_buckets(1, 2, 1);
  const std::vector<double> x{1, 2, 3, 4};
  const PlainSketch sk = sketch_apply(x, SketchKind::cm, cfg, seeds);
  CHECK(sk.row(0)[0] == 3.0);
  CHECK(sk.row(0)[1] == 7.0);
  CHECK(sk.count_min(0) == 3.0);
  CHECK(sk.count_median(3) == 7.0);
}

TEST_CASE("apply matches explicit matrix product") {
  const std::uint64_t n = 500;
  const auto cfg = SketchConfig::with_buckets(5, 37, 4);
  const SeedSet seeds = derive_seed_set(9, n, cfg.s, cfg.d, false);
  std::mt19937_64 rng(1);
  const auto x = brute::random_ints(rng, n, -50, 50);
  for (auto kind : {SketchKind::cm, SketchKind::cs}) {
    const PlainSketch sk = sketch_apply(x, kind, cfg, seeds);
    for (std::uint32_t i = 0; i < cfg.d; ++i) {
      std::vector<double> row(cfg.s, 0.0);
      for (std::uint64_t j = 0; j < n; ++j) {
        const int sign = kind == SketchKind::cs ? seeds.signs[i].sign(j) : 1;
        row[seeds.hashes[i].bucket(j)] += sign * x[j];
      }
      for (std::uint32_t b = 0; b < cfg.s; ++b) CHECK(sk.cell(i, b) == row[b]);
    }
  }
  CHECK_THROWS_AS(sketch_apply(std::vector<double>(n + 1, 0.0), SketchKind::cm, cfg, seeds),
                  Error);
}

TEST_CASE("zero vector, mass conservation and one-sidedness") {
  const std::uint64_t n = 1000;
  const auto cfg = SketchConfig::with_buckets(10, 40, 9);
  const SeedSet seeds = derive_seed_set(3, n, cfg.s, cfg.d, false);
  const PlainSketch zero = sketch_apply(std::vector<double>(n, 0.0), SketchKind::cm, cfg, seeds);
  for (double c : zero.cells()) CHECK(c == 0.0);
  for (auto v : zero.recover_all(Estimator::count_median)) CHECK(v == 0.0);

  const PlainSketch ones = sketch_apply(std::vector<double>(n, 1.0), SketchKind::cm, cfg, seeds);
  for (std::uint32_t i = 0; i < cfg.d; ++i) {
    double sum = 0.0;
    for (double c : ones.row(i)) sum += c;
    CHECK(sum == static_cast<double>(n));
  }

  std::mt19937_64 rng(4);
  const auto x = brute::random_ints(rng, n, 0, 30);
  const PlainSketch sk = sketch_apply(x, SketchKind::cm, cfg, seeds);
  for (double c : sk.cells()) CHECK(c >= 0.0);
  for (std::uint64_t j = 0; j < n; ++j) CHECK(sk.count_min(j) >= x[j]);
}

TEST_CASE("1-sparse vectors are recovered exactly") {
  const std::uint64_t n = 300;
  const auto cfg = SketchConfig::with_buckets(1, 2, 9);
  const SeedSet seeds = derive_seed_set(12, n, cfg.s, cfg.d, false);
  std::vector<double> x(n, 0.0);
  x[77] = 7.0;
  const PlainSketch cm = sketch_apply(x, SketchKind::cm, cfg, seeds);
  const PlainSketch cs = sketch_apply(x, SketchKind::cs, cfg, seeds);
  CHECK(cm.count_median(77) == 7.0);
  CHECK(cm.count_min(77) == 7.0);
  CHECK(cs.count_sketch(77) == 7.0);

  const auto big = SketchConfig::with_buckets(1, 4096, 9);
  const SeedSet bs = derive_seed_set(12, n, big.s, big.d, false);
  CHECK(sketch_apply(x, SketchKind::cm, big, bs).recover_all(Estimator::count_median) == x);
  CHECK(sketch_apply(x, SketchKind::cs, big, bs).recover_all(Estimator::count_sketch) == x);
}

TEST_CASE("updates") {
  const std::uint64_t n = 2000;
  const auto cfg = SketchConfig::with_buckets(10, 64, 7);
  const SeedSet seeds = derive_seed_set(21, n, cfg.s, cfg.d, false);
  for (auto kind : {SketchKind::cm, SketchKind::cs}) {
    PlainSketch sk(kind, cfg, seeds);
    const PlainSketch empty = sk;
    sk.update(5, 3.0);
    sk.update(5, -3.0);
    CHECK(sk.cells().size() == empty.cells().size());
    CHECK(std::equal(sk.cells().begin(), sk.cells().end(), empty.cells().begin()));

    PlainSketch single(kind, cfg, seeds);
    single.update(9, 5.0);
    std::vector<double> e(n, 0.0);
    e[9] = 5.0;
    CHECK(single == sketch_apply(e, kind, cfg, seeds));

    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    std::uniform_real_distribution<double> delta(-10.0, 10.0);
    PlainSketch live(kind, cfg, seeds);
    std::vector<double> acc(n, 0.0);
    for (int t = 0; t < 10000; ++t) {
      const auto j = pick(rng);
      const double v = delta(rng);
      live.update(j, v);
      acc[j] += v;
    }
    const PlainSketch batch = sketch_apply(acc, kind, cfg, seeds);
    CHECK(brute::max_abs_diff(live.cells(), batch.cells()) <= 1e-9);
    CHECK_THROWS_AS(live.update(n, 1.0), Error);
  }
}

TEST_CASE("merge is linear") {
  const std::uint64_t n = 1000;
  const auto cfg = SketchConfig::with_buckets(10, 50, 9);
  const SeedSet seeds = derive_seed_set(30, n, cfg.s, cfg.d, false);
  std::mt19937_64 rng(8);
  for (auto kind : {SketchKind::cm, SketchKind::cs}) {
    const auto x = brute::random_ints(rng, n, -100, 100);
    const auto y = brute::random_ints(rng, n, -100, 100);
    const auto sx = sketch_apply(x, kind, cfg, seeds);
    const auto sy = sketch_apply(y, kind, cfg, seeds);
    CHECK(sketch_merge(sx, sy) == sketch_apply(brute::add(x, y), kind, cfg, seeds));
    CHECK(sketch_merge(sx, PlainSketch(kind, cfg, seeds)) == sx);

    std::vector<double> neg(x);
    for (double& v : neg) v = -v;
    for (double c : sketch_merge(sx, sketch_apply(neg, kind, cfg, seeds)).cells()) CHECK(c == 0.0);
  }
  const auto a = sketch_apply(std::vector<double>(n, 1.0), SketchKind::cm, cfg, seeds);
  const auto other = derive_seed_set(31, n, cfg.s, cfg.d, false);
  const auto b = sketch_apply(std::vector<double>(n, 1.0), SketchKind::cm, cfg, other);
  try {
    sketch_merge(a, b);
    FAIL("expected incompatible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::incompatible);
  }
  const auto c = sketch_apply(std::vector<double>(n, 1.0), SketchKind::cs, cfg, seeds);
  CHECK_THROWS_AS(sketch_merge(a, c), Error);
}

TEST_CASE("estimator and kind must agree; point equals recover_all") {
  const std::uint64_t n = 400;
  const auto cfg = SketchConfig::with_buckets(5, 20, 10);
  const SeedSet seeds = derive_seed_set(1, n, cfg.s, cfg.d, false);
  const auto x = noisy_sparse(n, 5, 3);
  const auto cm = sketch_apply(x, SketchKind::cm, cfg, seeds);
  const auto cs = sketch_apply(x, SketchKind::cs, cfg, seeds);
  CHECK_THROWS_AS(cm.count_sketch(0), Error);
  CHECK_THROWS_AS(cs.count_median(0), Error);
  CHECK_THROWS_AS(cs.recover_all(Estimator::count_min), Error);
  for (auto est : {Estimator::count_median, Estimator::count_min}) {
    const auto all = cm.recover_all(est);
    for (std::uint64_t j = 0; j < n; ++j) CHECK(cm.point(est, j) == all[j]);
  }
  const auto all = cs.recover_all(Estimator::count_sketch);
  for (std::uint64_t j = 0; j < n; ++j) CHECK(cs.point(Estimator::count_sketch, j) == all[j]);
}

TEST_CASE("tail-error bounds hold in most trials") {
  const std::uint64_t n = 100, k = 5;
  const auto cfg = SketchConfig::with_buckets(k, 40, 9);
  int ok_cm = 0, ok_cs = 0, ok_l1 = 0, ok_l2 = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto x = noisy_sparse(n, k, 100 + t);
    const SeedSet seeds = derive_seed_set(t, n, cfg.s, cfg.d, false);
    const auto cm = sketch_apply(x, SketchKind::cm, cfg, seeds).recover_all(Estimator::count_median);
    const auto cs = sketch_apply(x, SketchKind::cs, cfg, seeds).recover_all(Estimator::count_sketch);
    const double e1 = tail_error(x, k, Norm::l1).value;
    const double e2 = tail_error(x, k, Norm::l2).value;
    ok_cm += brute::max_abs_diff(cm, x) <= 4.0 / k * e1;
    ok_cs += brute::max_abs_diff(cs, x) <= 4.0 / std::sqrt(double(k)) * e2;
    double n1 = 0.0, n2 = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) {
      n1 += std::abs(cm[j] - x[j]);
      n2 += (cs[j] - x[j]) * (cs[j] - x[j]);
    }
    ok_l1 += n1 <= 8.0 * e1;
    ok_l2 += std::sqrt(n2) <= 8.0 * e2;
  }
  CHECK(ok_cm >= 95);
  CHECK(ok_cs >= 95);
  CHECK(ok_l1 >= 95);
  CHECK(ok_l2 >= 95);
}
