#include "biask/bias_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "biask/error.hpp"

namespace biask {

BucketLoads compute_bucket_loads(const SeedSet& seeds, const SketchConfig& cfg,
                                 std::uint64_t n) {
  if (seeds.n != n) raise(Errc::config, "bucket loads: seed domain does not match n");
  if (seeds.s != cfg.s || seeds.hashes.size() < cfg.d) {
    raise(Errc::config, "bucket loads: seed set does not match the sketch shape");
  }
  BucketLoads loads;
  loads.s = cfg.s;
  loads.d = cfg.d;
  const std::size_t s = cfg.s;
  if (seeds.load_hash) {
    loads.pi.assign(s, 0);
    for (std::uint64_t j = 0; j < n; ++j) ++loads.pi[seeds.load_hash->bucket_unchecked(j)];
  }
  loads.counts.assign(s * cfg.d, 0);
  const bool with_signs = seeds.signs.size() >= cfg.d;
  if (with_signs) loads.psi.assign(s * cfg.d, 0);
  for (std::uint32_t i = 0; i < cfg.d; ++i) {
    std::uint64_t* count = loads.counts.data() + i * s;
    const HashSpec& h = seeds.hashes[i];
    if (with_signs) {
      std::int64_t* psi = loads.psi.data() + i * s;
      const SignSpec& r = seeds.signs[i];
      for (std::uint64_t j = 0; j < n; ++j) {
        const std::uint64_t b = h.bucket_unchecked(j);
        ++count[b];
        psi[b] += r.sign_unchecked(j);
      }
    } else {
      for (std::uint64_t j = 0; j < n; ++j) ++count[h.bucket_unchecked(j)];
    }
  }
  return loads;
}

std::uint32_t l1_sample_count(std::uint64_t n) {
  if (n == 0) raise(Errc::degenerate, "l1 sketch of an empty vector");
  if (n == 1) return 1;
  auto t = static_cast<std::uint32_t>(std::ceil(20.0 * std::log2(static_cast<double>(n))));
  if (t % 2 == 0) ++t;
  return t;
}

namespace {

void check_loads(const BucketLoads& loads, const SketchConfig& cfg) {
  if (loads.s != cfg.s || loads.d != cfg.d) {
    raise(Errc::config, "bucket loads were computed for a different sketch shape");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// l1

L1Sketch::L1Sketch(const SketchConfig& cfg, SeedSet seeds)
    : cm_(SketchKind::cm, cfg, std::move(seeds)) {
  const std::uint64_t n = cm_.dimension();
  positions_ = sample_indices(cm_.seeds().sampler_seed, n, l1_sample_count(n));
  values_.assign(positions_.size(), 0.0);
}

L1Sketch L1Sketch::build(std::span<const double> x, const SketchConfig& cfg,
                         const SeedSet& seeds) {
  if (x.empty()) raise(Errc::degenerate, "l1 sketch of an empty vector");
  L1Sketch sk(cfg, seeds);
  sk.cm_ = PlainSketch::apply(x, SketchKind::cm, cfg, seeds);
  for (std::size_t t = 0; t < sk.positions_.size(); ++t) sk.values_[t] = x[sk.positions_[t]];
  return sk;
}

void L1Sketch::update(std::uint64_t j, double delta) {
  cm_.update(j, delta);
  for (std::size_t t = 0; t < positions_.size(); ++t) {
    if (positions_[t] == j) values_[t] += delta;
  }
}

void L1Sketch::add_scaled(const L1Sketch& other, double alpha) {
  cm_.add_scaled(other.cm_, alpha);
  for (std::size_t t = 0; t < values_.size(); ++t) values_[t] += alpha * other.values_[t];
}

double L1Sketch::estimate_bias() const { return median_of(values_); }

double L1Sketch::point(const BucketLoads& loads, std::uint64_t j) const {
  check_index(j, dimension(), "l1_point");
  check_loads(loads, config());
  const double beta = estimate_bias();
  return median_over_rows(config().d, [&](std::uint32_t i) {
           const std::uint64_t b = cm_.bucket_of(i, j);
           return debias_cm(cm_.cell(i, b), loads.count(i, b), beta);
         }) +
         beta;
}

double L1Sketch::point(std::uint64_t j) const {
  return point(compute_bucket_loads(seeds(), config(), dimension()), j);
}

std::vector<double> L1Sketch::recover(const BucketLoads& loads) const {
  check_loads(loads, config());
  const double beta = estimate_bias();
  const std::uint32_t d = config().d;
  const std::size_t s = config().s;
  // De-biased rows, y~^i = y^i - beta * pi^i.
  std::vector<double> debiased(cm_.cells().begin(), cm_.cells().end());
  for (std::uint32_t i = 0; i < d; ++i) {
    for (std::size_t b = 0; b < s; ++b) {
      debiased[i * s + b] = debias_cm(cm_.cell(i, b), loads.count(i, b), beta);
    }
  }
  std::vector<double> out(dimension());
  for (std::uint64_t j = 0; j < out.size(); ++j) {
    out[j] = median_over_rows(d, [&](std::uint32_t i) {
               return debiased[i * s + cm_.bucket_of(i, j)];
             }) +
             beta;
  }
  return out;
}

std::vector<double> L1Sketch::recover() const {
  return recover(compute_bucket_loads(seeds(), config(), dimension()));
}

// ---------------------------------------------------------------------------
// l2

double l2_estimate_bias(std::span<const double> w, std::span<const std::uint64_t> pi,
                        std::uint32_t k) {
  if (w.size() != pi.size()) raise(Errc::argument, "load row and loads differ in length");
  if (k == 0) raise(Errc::config, "k must be positive");
  std::vector<std::uint32_t> nonempty;
  nonempty.reserve(w.size());
  for (std::uint32_t b = 0; b < w.size(); ++b) {
    if (pi[b] > 0) nonempty.push_back(b);
  }
  const std::size_t tracked = nonempty.size();
  if (tracked < 4 * std::size_t{k}) {
    raise(Errc::insufficient_buckets,
          "bias estimation needs at least 4k = " + std::to_string(4 * std::size_t{k}) +
              " nonempty buckets, found " + std::to_string(tracked));
  }
  auto ratio = [&](std::uint32_t b) { return w[b] / static_cast<double>(pi[b]); };
  std::sort(nonempty.begin(), nonempty.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double ra = ratio(a), rb = ratio(b);
    if (ra < rb) return true;
    if (rb < ra) return false;
    return a < b;
  });
  const std::size_t mid = tracked / 2;
  double w_sum = 0.0, pi_sum = 0.0;
  for (std::size_t r = mid - k; r < mid + k; ++r) {
    w_sum += w[nonempty[r]];
    pi_sum += static_cast<double>(pi[nonempty[r]]);
  }
  return w_sum / pi_sum;
}

L2Sketch::L2Sketch(const SketchConfig& cfg, SeedSet seeds)
    : cs_(SketchKind::cs, cfg, std::move(seeds)) {
  cfg.validate_bias_window();
  if (!cs_.seeds().load_hash) raise(Errc::config, "l2 sketch needs a load hash");
  load_row_.assign(cfg.s, 0.0);
}

L2Sketch L2Sketch::build(std::span<const double> x, const SketchConfig& cfg,
                         const SeedSet& seeds) {
  L2Sketch sk(cfg, seeds);
  sk.cs_ = PlainSketch::apply(x, SketchKind::cs, cfg, seeds);
  const HashSpec& g = *seeds.load_hash;
  for (std::size_t j = 0; j < x.size(); ++j) sk.load_row_[g.bucket_unchecked(j)] += x[j];
  return sk;
}

void L2Sketch::update(std::uint64_t j, double delta) {
  cs_.update(j, delta);
  load_row_[seeds().load_hash->bucket_unchecked(j)] += delta;
}

void L2Sketch::add_scaled(const L2Sketch& other, double alpha) {
  cs_.add_scaled(other.cs_, alpha);
  for (std::size_t b = 0; b < load_row_.size(); ++b) load_row_[b] += alpha * other.load_row_[b];
}

double L2Sketch::estimate_bias(const BucketLoads& loads) const {
  check_loads(loads, config());
  return l2_estimate_bias(load_row_, loads.pi, config().k);
}

double L2Sketch::point(const BucketLoads& loads, std::uint64_t j) const {
  check_index(j, dimension(), "l2_point");
  const double beta = estimate_bias(loads);
  return median_over_rows(config().d, [&](std::uint32_t i) {
           const std::uint64_t b = cs_.bucket_of(i, j);
           return debias_cs(cs_.cell(i, b), loads.signed_load(i, b), cs_.sign_of(i, j), beta);
         }) +
         beta;
}

double L2Sketch::point(std::uint64_t j) const {
  return point(compute_bucket_loads(seeds(), config(), dimension()), j);
}

std::vector<double> L2Sketch::recover(const BucketLoads& loads) const {
  const double beta = estimate_bias(loads);
  const std::uint32_t d = config().d;
  std::vector<double> out(dimension());
  for (std::uint64_t j = 0; j < out.size(); ++j) {
    out[j] = median_over_rows(d, [&](std::uint32_t i) {
               const std::uint64_t b = cs_.bucket_of(i, j);
               return debias_cs(cs_.cell(i, b), loads.signed_load(i, b), cs_.sign_of(i, j),
                                beta);
             }) +
             beta;
  }
  return out;
}

std::vector<double> L2Sketch::recover() const {
  return recover(compute_bucket_loads(seeds(), config(), dimension()));
}

// ---------------------------------------------------------------------------
// mean heuristics

std::vector<double> mean_bias_recover(const PlainSketch& sk, double running_sum,
                                      std::uint64_t n, const BucketLoads& loads) {
  if (n != sk.dimension()) raise(Errc::config, "mean-bias recovery: dimension mismatch");
  check_loads(loads, sk.config());
  const double beta = running_sum / static_cast<double>(n);
  const std::uint32_t d = sk.depth();
  std::vector<double> out(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    if (sk.kind() == SketchKind::cm) {
      out[j] = median_over_rows(d, [&](std::uint32_t i) {
                 const std::uint64_t b = sk.bucket_of(i, j);
                 return debias_cm(sk.cell(i, b), loads.count(i, b), beta);
               }) +
               beta;
    } else {
      out[j] = median_over_rows(d, [&](std::uint32_t i) {
                 const std::uint64_t b = sk.bucket_of(i, j);
                 return debias_cs(sk.cell(i, b), loads.signed_load(i, b), sk.sign_of(i, j),
                                  beta);
               }) +
               beta;
    }
  }
  return out;
}

std::vector<double> mean_bias_recover(const PlainSketch& sk, double running_sum,
                                      std::uint64_t n) {
  return mean_bias_recover(sk, running_sum, n,
                           compute_bucket_loads(sk.seeds(), sk.config(), sk.dimension()));
}

}  // namespace biask
