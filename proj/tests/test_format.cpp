#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>

#include "biask/bench.hpp"
#include "biask/format.hpp"
#include "support/errors.hpp"

using namespace biask;

namespace {

const std::uint64_t kN = 700;

std::vector<AnySketch> one_of_each() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::vector<double> x(kN);
  for (double& v : x) v = u(rng);
  const auto cfg = SketchConfig::from_multiplier(4, 4.0, 5);
  std::vector<AnySketch> out;
  const SeedSet plain = derive_seed_set(9, kN, cfg.s, cfg.d, false);
  const SeedSet loaded = derive_seed_set(9, kN, cfg.s, cfg.d, true);
  out.emplace_back(sketch_apply(x, SketchKind::cm, cfg, plain));
  out.emplace_back(sketch_apply(x, SketchKind::cs, cfg, plain));
  PlainSketch with_total = sketch_apply(x, SketchKind::cm, cfg, plain);
  with_total.set_tracks_total(true);
  with_total.set_total(1234.5);
  out.emplace_back(with_total);
  out.emplace_back(L1Sketch::build(x, cfg, plain));
  out.emplace_back(L2Sketch::build(x, cfg, loaded));
  out.emplace_back(DyadicSketch::build(x, cfg, 9));
  return out;
}

std::size_t offset_of(std::span<const std::uint8_t> bytes) {
  try {
    deserialize(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  FAIL("expected a format error");
  return 0;
}

}  // namespace

TEST_CASE("round trips are byte-identical") {
  for (const auto& sk : one_of_each()) {
    const auto bytes = serialize(sk);
    CHECK(bytes.size() >= kHeaderBytes);
    CHECK(std::memcmp(bytes.data(), "BASK", 4) == 0);
    const AnySketch back = deserialize(bytes);
    CHECK(back == sk);
    CHECK(serialize(back) == bytes);
    CHECK(sketch_words(sk) == words_for_bytes(bytes.size()));
  }
}

TEST_CASE("queries agree after loading") {
  for (const auto& sk : one_of_each()) {
    const AnySketch back = deserialize(serialize(sk));
    for (std::uint64_t j = 0; j < kN; j += 13) CHECK(point_default(back, j) == point_default(sk, j));
  }
}

TEST_CASE("corrupt headers report offsets") {
  const auto good = serialize(one_of_each()[0]);
  auto bad = good;
  bad[0] = 'X';
  CHECK(offset_of(bad) == 0);
  bad = good;
  bad[4] = 2;
  CHECK(offset_of(bad) == 4);
  bad = good;
  bad[6] = 9;
  CHECK(offset_of(bad) == 6);
  bad = good;
  bad[7] = 0x80;
  CHECK(offset_of(bad) == 7);
  CHECK(offset_of(std::span<const std::uint8_t>(good).first(3)) == 0);
  CHECK(offset_of(std::span<const std::uint8_t>(good).first(20)) == 20);
}

TEST_CASE("truncation and trailing bytes") {
  for (const auto& sk : one_of_each()) {
    const auto bytes = serialize(sk);
    for (std::size_t cut : {kHeaderBytes, kHeaderBytes + 7, bytes.size() - 1}) {
      CHECK(error_code([&] { deserialize(std::span<const std::uint8_t>(bytes).first(cut)); }) ==
            Errc::format);
    }
    auto longer = bytes;
    longer.push_back(0);
    CHECK(offset_of(longer) == bytes.size());
  }
}

TEST_CASE("tampered l1 sample positions are rejected") {
  const AnySketch sk = one_of_each()[3];
  auto bytes = serialize(sk);
  const auto& l1 = std::get<L1Sketch>(sk);
  const std::size_t rows = l1.config().s * std::size_t{l1.config().d} * 8;
  const std::size_t first_index = kHeaderBytes + rows + 4;
  bytes[first_index] ^= 1;
  CHECK(offset_of(bytes) == first_index);
}

TEST_CASE("hand-built seeds cannot be serialized") {
  SeedSet s = derive_seed_set(1, 10, 4, 3, false);
  s.derived = false;
  const PlainSketch sk(SketchKind::cm, SketchConfig::with_buckets(1, 4, 3), s);
  CHECK(error_code([&] { serialize(AnySketch(sk)); }) == Errc::argument);
}

TEST_CASE("files") {
  const char* env = std::getenv("BIASK_TMPDIR");
  const std::filesystem::path dir = env ? env : std::filesystem::temp_directory_path();
  std::filesystem::create_directories(dir);
  const auto path = (dir / "format_test.bask").string();
  const auto all = one_of_each();
  sketch_save(path, all[4]);
  CHECK(sketch_load(path) == all[4]);
  std::remove(path.c_str());
  CHECK(error_code([&] { sketch_load((dir / "missing.bask").string()); }) == Errc::io);
}
