#pragma once

// Seed-derived hash, sign and sampling functions. These are the implicit
// sketching matrices: a CM-matrix column j has its single 1 at row h(j), a
// CS-matrix column additionally carries the sign r(j), and a sampling matrix
// row picks one coordinate.
//
// Hashes are polynomials over GF(2^61 - 1) evaluated by Horner's rule. The
// default independence degree is 4 (a cubic with four coefficients). Range
// reduction to [0, s) is multiply-shift: floor(h * s / 2^61). The resulting
// bias is at most s / 2^61 per bucket, negligible for s < 2^32.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace biask {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
inline constexpr std::uint32_t kDefaultDegree = 4;
inline constexpr std::uint32_t kMaxDegree = 8;

/// splitmix64 finalizer. Pure, platform independent.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class SeedRole : std::uint32_t {
  bucket_hash = 1,
  sign = 2,
  load_hash = 3,
  sampler = 4,
  dyadic_level = 5,
  dataset = 6,
  sketch = 7,
  coefficient = 8,
  sample = 9,
};

/// Child seed for (role, index) under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedRole role,
                                    std::uint64_t index) noexcept {
  const std::uint64_t tag =
      (static_cast<std::uint64_t>(role) << 48) ^ (index * 0xd1342543de82ef95ULL);
  return splitmix64(master ^ splitmix64(tag));
}

inline std::uint64_t mul_mod61(std::uint64_t a, std::uint64_t b) noexcept {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t r = (static_cast<std::uint64_t>(p) & kMersenne61) +
                    static_cast<std::uint64_t>(p >> 61);
  r = (r & kMersenne61) + (r >> 61);
  return r >= kMersenne61 ? r - kMersenne61 : r;
}

/// Polynomial with coefficients in [0, 2^61 - 1).
class PolyHash {
 public:
  PolyHash() = default;
  PolyHash(std::uint64_t seed, std::uint32_t degree);
  explicit PolyHash(std::span<const std::uint64_t> coefficients);

  /// Value in [0, 2^61 - 1).
  std::uint64_t operator()(std::uint64_t key) const noexcept {
    const std::uint64_t x = key % kMersenne61;
    std::uint64_t h = coeff_[degree_ - 1];
    for (std::uint32_t i = degree_ - 1; i-- > 0;) {
      h = mul_mod61(h, x) + coeff_[i];
      if (h >= kMersenne61) h -= kMersenne61;
    }
    return h;
  }

  std::uint32_t degree() const noexcept { return degree_; }
  std::span<const std::uint64_t> coefficients() const noexcept {
    return {coeff_.data(), degree_};
  }

  friend bool operator==(const PolyHash& a, const PolyHash& b) noexcept {
    if (a.degree_ != b.degree_) return false;
    for (std::uint32_t i = 0; i < a.degree_; ++i)
      if (a.coeff_[i] != b.coeff_[i]) return false;
    return true;
  }

 private:
  std::array<std::uint64_t, kMaxDegree> coeff_{};
  std::uint32_t degree_ = 1;
};

/// h : [n] -> [s].
struct HashSpec {
  std::uint64_t seed = 0;
  std::uint64_t domain_n = 1;
  std::uint64_t range_s = 1;
  PolyHash poly;

  static HashSpec from_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t s,
                            std::uint32_t degree = kDefaultDegree);
  /// Fixed polynomial, for hand-built matrices in tests and tools.
  static HashSpec from_coefficients(std::uint64_t n, std::uint64_t s,
                                    std::span<const std::uint64_t> coefficients);

  std::uint32_t degree() const noexcept { return poly.degree(); }

  std::uint64_t bucket_unchecked(std::uint64_t j) const noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(poly(j)) * range_s) >> 61);
  }
  std::uint64_t bucket(std::uint64_t j) const;

  friend bool operator==(const HashSpec&, const HashSpec&) = default;
};

/// r : [n] -> {-1, +1}, taken from bit 60 of a polynomial hash.
struct SignSpec {
  std::uint64_t seed = 0;
  std::uint64_t domain_n = 1;
  PolyHash poly;

  static SignSpec from_seed(std::uint64_t seed, std::uint64_t n,
                            std::uint32_t degree = kDefaultDegree);
  static SignSpec from_coefficients(std::uint64_t n,
                                    std::span<const std::uint64_t> coefficients);

  int sign_unchecked(std::uint64_t j) const noexcept {
    return (poly(j) >> 60) ? -1 : 1;
  }
  int sign(std::uint64_t j) const;

  friend bool operator==(const SignSpec&, const SignSpec&) = default;
};

/// The shared randomness of a sketch: d bucket hashes, d sign functions, an
/// optional load hash g and the sampler seed. Everything is re-derivable from
/// (master_seed, n, s, d, with_load_hash); only those five values travel.
struct SeedSet {
  std::uint64_t master_seed = 0;
  std::uint64_t n = 1;
  std::uint64_t s = 1;
  std::uint32_t d = 1;
  std::vector<HashSpec> hashes;
  std::vector<SignSpec> signs;
  std::optional<HashSpec> load_hash;
  std::uint64_t sampler_seed = 0;
  /// False once any spec was replaced by hand; such sets cannot be serialized
  /// because the file format only carries the master seed.
  bool derived = true;

  friend bool operator==(const SeedSet&, const SeedSet&) = default;
};

SeedSet derive_seed_set(std::uint64_t master_seed, std::uint64_t n, std::uint64_t s,
                        std::uint32_t d, bool with_load_hash);

std::uint64_t hash_bucket(const HashSpec& spec, std::uint64_t j);
int hash_sign(const SignSpec& spec, std::uint64_t j);

/// t coordinates of [0, n) drawn uniformly with replacement.
std::vector<std::uint64_t> sample_indices(std::uint64_t sampler_seed, std::uint64_t n,
                                          std::uint64_t t);

}  // namespace biask
