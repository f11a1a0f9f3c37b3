#include "biask/hashing.hpp"

#include <string>

#include "biask/error.hpp"

namespace biask {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::config: return "configuration error";
    case Errc::format: return "format error";
    case Errc::index: return "index error";
    case Errc::incompatible: return "incompatible sketches";
    case Errc::argument: return "invalid argument";
    case Errc::degenerate: return "degenerate input";
    case Errc::insufficient_buckets: return "insufficient buckets";
    case Errc::io: return "i/o error";
  }
  return "unknown error";
}

namespace {

std::uint64_t field_element(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t v = derive_seed(seed, SeedRole::coefficient, i) >> 3;
  return v >= kMersenne61 ? v - kMersenne61 : v;
}

void check_degree(std::size_t degree) {
  if (degree < 2 || degree > kMaxDegree) {
    raise(Errc::config, "hash independence degree must lie in [2, " +
                            std::to_string(kMaxDegree) + "], got " +
                            std::to_string(degree));
  }
}

}  // namespace

PolyHash::PolyHash(std::uint64_t seed, std::uint32_t degree) : degree_(degree) {
  check_degree(degree);
  for (std::uint32_t i = 0; i < degree; ++i) coeff_[i] = field_element(seed, i);
}

PolyHash::PolyHash(std::span<const std::uint64_t> coefficients)
    : degree_(static_cast<std::uint32_t>(coefficients.size())) {
  if (coefficients.empty() || coefficients.size() > kMaxDegree) {
    raise(Errc::config, "polynomial needs 1.." + std::to_string(kMaxDegree) +
                            " coefficients");
  }
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (coefficients[i] >= kMersenne61)
      raise(Errc::config, "polynomial coefficient outside GF(2^61 - 1)");
    coeff_[i] = coefficients[i];
  }
}

HashSpec HashSpec::from_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t s,
                             std::uint32_t degree) {
  if (n == 0 || s == 0) raise(Errc::config, "hash domain and range must be positive");
  if (s >= (std::uint64_t{1} << 32)) raise(Errc::config, "hash range must be below 2^32");
  return HashSpec{seed, n, s, PolyHash(seed, degree)};
}

HashSpec HashSpec::from_coefficients(std::uint64_t n, std::uint64_t s,
                                     std::span<const std::uint64_t> coefficients) {
  if (n == 0 || s == 0) raise(Errc::config, "hash domain and range must be positive");
  return HashSpec{0, n, s, PolyHash(coefficients)};
}

std::uint64_t HashSpec::bucket(std::uint64_t j) const {
  check_index(j, domain_n, "hash_bucket");
  return bucket_unchecked(j);
}

SignSpec SignSpec::from_seed(std::uint64_t seed, std::uint64_t n, std::uint32_t degree) {
  if (n == 0) raise(Errc::config, "sign domain must be positive");
  return SignSpec{seed, n, PolyHash(seed, degree)};
}

SignSpec SignSpec::from_coefficients(std::uint64_t n,
                                     std::span<const std::uint64_t> coefficients) {
  if (n == 0) raise(Errc::config, "sign domain must be positive");
  return SignSpec{0, n, PolyHash(coefficients)};
}

int SignSpec::sign(std::uint64_t j) const {
  check_index(j, domain_n, "hash_sign");
  return sign_unchecked(j);
}

SeedSet derive_seed_set(std::uint64_t master_seed, std::uint64_t n, std::uint64_t s,
                        std::uint32_t d, bool with_load_hash) {
  if (n == 0 || s == 0 || d == 0) {
    raise(Errc::config, "seed set requires n >= 1, s >= 1 and d >= 1");
  }
  SeedSet set;
  set.master_seed = master_seed;
  set.n = n;
  set.s = s;
  set.d = d;
  set.hashes.reserve(d);
  set.signs.reserve(d);
  for (std::uint32_t i = 0; i < d; ++i) {
    set.hashes.push_back(
        HashSpec::from_seed(derive_seed(master_seed, SeedRole::bucket_hash, i), n, s));
    set.signs.push_back(
        SignSpec::from_seed(derive_seed(master_seed, SeedRole::sign, i), n));
  }
  if (with_load_hash) {
    set.load_hash =
        HashSpec::from_seed(derive_seed(master_seed, SeedRole::load_hash, 0), n, s);
  }
  set.sampler_seed = derive_seed(master_seed, SeedRole::sampler, 0);
  return set;
}

std::uint64_t hash_bucket(const HashSpec& spec, std::uint64_t j) { return spec.bucket(j); }

int hash_sign(const SignSpec& spec, std::uint64_t j) { return spec.sign(j); }

std::vector<std::uint64_t> sample_indices(std::uint64_t sampler_seed, std::uint64_t n,
                                          std::uint64_t t) {
  if (n == 0) raise(Errc::config, "sample_indices requires n >= 1");
  std::vector<std::uint64_t> out;
  out.reserve(t);
  for (std::uint64_t i = 0; i < t; ++i) {
    const std::uint64_t v = derive_seed(sampler_seed, SeedRole::sample, i);
    out.push_back(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(v) * n) >> 64));
  }
  return out;
}

}  // namespace biask
