#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "biask/bench.hpp"
#include "biask/format.hpp"
#include "biask/oracles.hpp"
#include "support/errors.hpp"

using namespace biask;

TEST_CASE("gaussian generator") {
  const auto x = gen_gaussian(100000, 100.0, 15.0, 7);
  CHECK(x == gen_gaussian(100000, 100.0, 15.0, 7));
  CHECK_FALSE(x == gen_gaussian(100000, 100.0, 15.0, 8));
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  CHECK(mean >= 99.8);
  CHECK(mean <= 100.2);
  for (double v : gen_gaussian(1000, 42.0, 1e-12, 1)) CHECK(std::abs(v - 42.0) < 1e-9);
  CHECK(error_code([] { gen_gaussian(10, 0.0, 0.0, 1); }) == Errc::config);
}

TEST_CASE("shifted generator") {
  CHECK(gen_gaussian_shifted(5000, 100.0, 15.0, 0, 1e5, 3) == gen_gaussian(5000, 100.0, 15.0, 3));
  const auto pos = shifted_positions(5000, 50, 3);
  CHECK(pos == shifted_positions(5000, 50, 3));
  CHECK(pos.size() == 50);
  CHECK(std::is_sorted(pos.begin(), pos.end()));
  CHECK(std::adjacent_find(pos.begin(), pos.end()) == pos.end());
  CHECK(error_code([] { shifted_positions(10, 11, 1); }) == Errc::config);

  const std::uint64_t n = 50000;
  const auto x = gen_gaussian_shifted(n, 100.0, 15.0, 50, 1e5, 11);
  const auto base = gen_gaussian(n, 100.0, 15.0, 11);
  for (auto j : shifted_positions(n, 50, 11)) CHECK(x[j] == base[j] + 1e5);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  CHECK(mean == doctest::Approx(200.0).epsilon(0.01));
  const double beta = best_bias_l2(x, 50).beta;
  CHECK(beta >= 98.0);
  CHECK(beta <= 102.0);
}

TEST_CASE("metrics") {
  const std::vector<double> zero{0, 0};
  const std::vector<double> hat{1, 3};
  const Metrics m = compute_metrics(zero, hat);
  CHECK(m.avg_error == 2.0);
  CHECK(m.max_error == 3.0);
  CHECK(compute_metrics(hat, hat).max_error == 0.0);
  CHECK(error_code([&] { compute_metrics(zero, std::vector<double>{1}); }) == Errc::argument);

  const std::uint64_t n = 2000;
  const auto x = gen_gaussian(n, 100.0, 15.0, 2);
  const auto cfg = SketchConfig::from_multiplier(10, 4.0, 9);
  for (Algorithm a : {Algorithm::l1sr, Algorithm::l2sr, Algorithm::cs, Algorithm::l2mean}) {
    const AnySketch sk = sketch_for(a, x, cfg, 4);
    const auto all = recover_for(a, sk);
    std::vector<double> pointwise(n);
    for (std::uint64_t j = 0; j < n; ++j) pointwise[j] = point_default(sk, j);
    const Metrics ma = compute_metrics(x, all), mp = compute_metrics(x, pointwise);
    CHECK(ma.avg_error == mp.avg_error);
    CHECK(ma.max_error == mp.max_error);
    CHECK(ma.avg_error <= ma.max_error);
  }
}

TEST_CASE("vector text parsing") {
  CHECK(parse_vector("1 2.5\n-3e2\t4") == std::vector<double>{1, 2.5, -300, 4});
  CHECK(parse_vector("  ").empty());
  try {
    parse_vector("1 2 three 4");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK(error_code([] { parse_vector("1 nan"); }) == Errc::format);
  CHECK(error_code([] { read_vector("/nonexistent/vector.txt"); }) == Errc::io);
  std::ostringstream out;
  const std::vector<double> v{0.1, 1e300, -2};
  write_vector(out, v);
  CHECK(parse_vector(out.str()) == v);
}

TEST_CASE("algorithm names") {
  for (Algorithm a : {Algorithm::l1sr, Algorithm::l2sr, Algorithm::cm, Algorithm::cs,
                      Algorithm::cmin, Algorithm::l1mean, Algorithm::l2mean}) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK_FALSE(parse_algorithm("nope").has_value());
  CHECK(default_depth(Algorithm::l2sr) == 9);
  CHECK(default_depth(Algorithm::cs) == 10);
}

TEST_CASE("sweep cardinality, order and determinism") {
  ExperimentConfig cfg;
  cfg.algorithms = {Algorithm::l2sr, Algorithm::cm};
  cfg.n = 3000;
  cfg.k = 5;
  cfg.s_values = {20, 40, 80};
  cfg.repeats = 2;
  const auto rows = run_sweep(cfg);
  CHECK(rows.size() == 12);
  CHECK(std::is_sorted(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
    return std::tie(a.algorithm, a.s, a.d, a.seed) < std::tie(b.algorithm, b.s, b.d, b.seed);
  }));
  for (const auto& r : rows) {
    CHECK(r.avg_error <= r.max_error);
    CHECK(r.build_ms == 0.0);
    CHECK(r.d == default_depth(r.algorithm));
    const AnySketch sk = sketch_for(r.algorithm, sweep_dataset(cfg, r.seed),
                                    SketchConfig::with_buckets(r.k, r.s, r.d),
                                    derive_seed(r.seed, SeedRole::sketch, 0));
    CHECK(r.sketch_words == sketch_words(sk));
  }
  std::ostringstream a, b;
  write_csv(a, rows);
  write_csv(b, run_sweep(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind(csv_header() + "\n", 0) == 0);

  ExperimentConfig bad = cfg;
  bad.s_values = {19};
  CHECK(error_code([&] { run_sweep(bad); }) == Errc::config);
  bad = cfg;
  bad.algorithms.clear();
  CHECK(error_code([&] { bad.validate(); }) == Errc::config);
}

TEST_CASE("exact regime gives zero error") {
  ExperimentConfig cfg;
  cfg.algorithms = {Algorithm::l1sr, Algorithm::l2sr};
  cfg.n = 500;
  cfg.k = 5;
  cfg.data.sigma = 1e-300;
  cfg.s_values = {100};
  for (const auto& r : run_sweep(cfg)) CHECK(r.max_error == 0.0);
}

TEST_CASE("bias invariance of l2sr across b") {
  ExperimentConfig cfg;
  cfg.algorithms = {Algorithm::l2sr, Algorithm::cs};
  cfg.n = 20000;
  cfg.k = 50;
  cfg.repeats = 3;
  const auto low = run_sweep(cfg);
  cfg.data.b = 500.0;
  const auto high = run_sweep(cfg);
  REQUIRE(low.size() == high.size());
  for (std::size_t i = 0; i < low.size(); ++i) {
    const double ratio = high[i].avg_error / low[i].avg_error;
    if (low[i].algorithm == Algorithm::l2sr) {
      CHECK(ratio >= 0.8);
      CHECK(ratio <= 1.25);
    } else {
      CHECK(ratio >= 2.0);
    }
  }
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -123456.789}) CHECK(std::stod(format_real(v)) == v);
  CHECK(format_real(2.0) == "2");
}
