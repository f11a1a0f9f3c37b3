#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "biask/error.hpp"
#include "biask/hashing.hpp"

using namespace biask;

TEST_CASE("splitmix64 and derive_seed are pure") {
  CHECK(splitmix64(0) == splitmix64(0));
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(42, SeedRole::bucket_hash, 0) == derive_seed(42, SeedRole::bucket_hash, 0));
  std::set<std::uint64_t> seen;
  for (auto role : {SeedRole::bucket_hash, SeedRole::sign, SeedRole::load_hash, SeedRole::sampler}) {
    for (std::uint64_t i = 0; i < 16; ++i) seen.insert(derive_seed(42, role, i));
  }
  CHECK(seen.size() == 64);
}

TEST_CASE("mul_mod61 agrees with 128-bit remainder") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100000; ++t) {
    const std::uint64_t a = rng() % kMersenne61;
    const std::uint64_t b = rng() % kMersenne61;
    const auto want = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % kMersenne61);
    REQUIRE(mul_mod61(a, b) == want);
  }
  CHECK(mul_mod61(kMersenne61 - 1, kMersenne61 - 1) == 1);
}

TEST_CASE("polynomial hash evaluates by Horner's rule") {
  const std::array<std::uint64_t, 3> c{5, 7, 11};  // 5 + 7x + 11x^2
  const PolyHash h{std::span<const std::uint64_t>(c)};
  CHECK(h(0) == 5);
  CHECK(h(1) == 23);
  CHECK(h(10) == 5 + 70 + 1100);
  CHECK(h(kMersenne61) == 5);  // keys reduce mod p
  CHECK_THROWS_AS(PolyHash(1, 1), Error);
  CHECK_THROWS_AS(PolyHash(1, kMaxDegree + 1), Error);
  const PolyHash g(99, kDefaultDegree);
  CHECK(g.degree() == 4);
  for (std::uint64_t coeff : g.coefficients()) CHECK(coeff < kMersenne61);
}

TEST_CASE("derive_seed_set structure and determinism") {
  const SeedSet a = derive_seed_set(42, 10, 8, 3, true);
  CHECK(a.hashes.size() == 3);
  CHECK(a.signs.size() == 3);
  CHECK(a.load_hash.has_value());
  CHECK(a == derive_seed_set(42, 10, 8, 3, true));
  CHECK_FALSE(a == derive_seed_set(43, 10, 8, 3, true));
  const SeedSet b = derive_seed_set(7, 1000000, 4096, 9, false);
  CHECK_FALSE(b.load_hash.has_value());
  for (const auto& h : b.hashes) {
    CHECK(h.domain_n == 1000000);
    CHECK(h.range_s == 4096);
    CHECK(h.degree() == kDefaultDegree);
  }
  CHECK_THROWS_AS(derive_seed_set(1, 0, 8, 3, false), Error);
}

TEST_CASE("hash_bucket range, determinism and index errors") {
  const HashSpec h = HashSpec::from_seed(3, 1000, 17);
  for (std::uint64_t j = 0; j < 1000; ++j) {
    const auto b = hash_bucket(h, j);
    CHECK(b < 17);
    CHECK(b == hash_bucket(h, j));
  }
  const HashSpec one = HashSpec::from_seed(3, 100, 1);
  for (std::uint64_t j = 0; j < 100; ++j) CHECK(hash_bucket(one, j) == 0);
  try {
    hash_bucket(h, 1000);
    FAIL("expected an index error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::index);
  }
}

TEST_CASE("hand-fixed hash splits {0,1} and {2,3}") {
  const std::array<std::uint64_t, 2> c{0, std::uint64_t{1} << 59};
  const HashSpec h = HashSpec::from_coefficients(4, 2, c);
  CHECK(h.bucket(0) == 0);
  CHECK(h.bucket(1) == 0);
  CHECK(h.bucket(2) == 1);
  CHECK(h.bucket(3) == 1);
}

TEST_CASE("pairwise collision rate is close to 1/s") {
  const std::uint64_t n = 100000, s = 100;
  const HashSpec h = HashSpec::from_seed(11, n, s);
  // Exhaustive over all pairs via bucket counts.
  std::vector<std::uint64_t> count(s, 0);
  for (std::uint64_t j = 0; j < n; ++j) ++count[h.bucket(j)];
  double colliding = 0.0;
  for (auto c : count) colliding += static_cast<double>(c) * (c - 1) / 2.0;
  const double rate = colliding / (static_cast<double>(n) * (n - 1) / 2.0);
  CHECK(rate >= 0.8 / s);
  CHECK(rate <= 1.2 / s);
}

TEST_CASE("signs are balanced and in {-1, +1}") {
  const std::uint64_t n = 100000;
  const SignSpec r = SignSpec::from_seed(8, n);
  long long sum = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    const int v = hash_sign(r, j);
    REQUIRE((v == 1 || v == -1));
    CHECK(v == hash_sign(r, j));
    sum += v;
  }
  CHECK(std::abs(static_cast<double>(sum) / n) <= 0.01);
  CHECK_THROWS_AS(hash_sign(r, n), Error);
}

TEST_CASE("sample_indices") {
  CHECK(sample_indices(5, 1, 10) == std::vector<std::uint64_t>(10, 0));
  CHECK(sample_indices(5, 100, 50) == sample_indices(5, 100, 50));

  const std::uint64_t n = 10000, t = 100000;
  const auto idx = sample_indices(77, n, t);
  REQUIRE(idx.size() == t);
  std::vector<std::uint64_t> freq(n, 0);
  for (auto i : idx) {
    REQUIRE(i < n);
    ++freq[i];
  }
  const double mean = static_cast<double>(t) / n;
  const double sd = std::sqrt(mean * (1.0 - 1.0 / n));
  for (auto f : freq) CHECK(std::abs(static_cast<double>(f) - mean) <= 5.0 * sd);
}

TEST_CASE("degree-4 family: joint distribution of four keys is uniform") {
  // For four distinct keys the bucket 4-tuple over random seeds should be
  // uniform on [s]^4. Chi-square against 256 equiprobable cells.
  const std::uint64_t s = 4, trials = 50000;
  const std::array<std::uint64_t, 4> keys{3, 17, 40, 63};
  std::vector<double> cell(256, 0.0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const HashSpec h = HashSpec::from_seed(derive_seed(2024, SeedRole::bucket_hash, t), 64, s);
    std::size_t c = 0;
    for (auto key : keys) c = c * s + h.bucket(key);
    cell[c] += 1.0;
  }
  const double expect = static_cast<double>(trials) / 256.0;
  double chi2 = 0.0;
  for (double o : cell) chi2 += (o - expect) * (o - expect) / expect;
  // 255 degrees of freedom: mean 255, standard deviation about 22.6.
  CHECK(chi2 < 255.0 + 6.0 * 22.6);
}
