#include "biask/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "biask/error.hpp"

namespace biask {

SketchConfig SketchConfig::from_multiplier(std::uint32_t k, double c_s, std::uint32_t d) {
  if (!(c_s > 0.0) || !std::isfinite(c_s)) raise(Errc::config, "c_s must be positive");
  const double s = std::ceil(c_s * static_cast<double>(k));
  if (s < 1.0 || s >= 4294967296.0) raise(Errc::config, "bucket count out of range");
  SketchConfig cfg{k, c_s, d, static_cast<std::uint32_t>(s)};
  cfg.validate();
  return cfg;
}

SketchConfig SketchConfig::with_buckets(std::uint32_t k, std::uint32_t s, std::uint32_t d) {
  if (k == 0) raise(Errc::config, "k must be positive");
  SketchConfig cfg{k, static_cast<double>(s) / static_cast<double>(k), d, s};
  cfg.validate();
  return cfg;
}

void SketchConfig::validate() const {
  if (k == 0) raise(Errc::config, "k must be positive");
  if (d == 0) raise(Errc::config, "d must be positive");
  if (s == 0) raise(Errc::config, "s must be positive");
}

void SketchConfig::validate_bias_window() const {
  validate();
  if (std::uint64_t{s} < 4 * std::uint64_t{k}) {
    raise(Errc::config, "bias-aware recovery needs s >= 4k (s = " + std::to_string(s) +
                            ", k = " + std::to_string(k) + ")");
  }
}

double median_inplace(std::span<double> values) {
  if (values.empty()) raise(Errc::argument, "median of an empty sequence");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  if (m % 2 == 1) return values[m / 2];
  return (values[m / 2 - 1] + values[m / 2]) / 2.0;
}

double median_of(std::span<const double> values) {
  std::vector<double> copy(values.begin(), values.end());
  return median_inplace(copy);
}

namespace {

void check_seeds(SketchKind kind, const SketchConfig& cfg, const SeedSet& seeds) {
  cfg.validate();
  if (seeds.s != cfg.s) {
    raise(Errc::config, "seed set range (" + std::to_string(seeds.s) +
                            ") does not match s = " + std::to_string(cfg.s));
  }
  if (seeds.hashes.size() < cfg.d) raise(Errc::config, "seed set has fewer than d hashes");
  if (kind == SketchKind::cs && seeds.signs.size() < cfg.d) {
    raise(Errc::config, "seed set has fewer than d sign functions");
  }
}

}  // namespace

PlainSketch::PlainSketch(SketchKind kind, const SketchConfig& cfg, SeedSet seeds)
    : kind_(kind), cfg_(cfg), seeds_(std::move(seeds)) {
  check_seeds(kind_, cfg_, seeds_);
  rows_.assign(std::size_t{cfg_.d} * cfg_.s, 0.0);
}

PlainSketch PlainSketch::apply(std::span<const double> x, SketchKind kind,
                               const SketchConfig& cfg, const SeedSet& seeds) {
  PlainSketch sk(kind, cfg, seeds);
  if (x.size() != seeds.n) {
    raise(Errc::config, "vector dimension " + std::to_string(x.size()) +
                            " does not match seed domain " + std::to_string(seeds.n));
  }
  const std::size_t s = cfg.s;
  for (std::uint32_t i = 0; i < cfg.d; ++i) {
    double* row = sk.rows_.data() + i * s;
    const HashSpec& h = sk.seeds_.hashes[i];
    if (kind == SketchKind::cm) {
      for (std::size_t j = 0; j < x.size(); ++j) row[h.bucket_unchecked(j)] += x[j];
    } else {
      const SignSpec& r = sk.seeds_.signs[i];
      for (std::size_t j = 0; j < x.size(); ++j) {
        row[h.bucket_unchecked(j)] += r.sign_unchecked(j) * x[j];
      }
    }
  }
  double total = 0.0;
  for (double v : x) total += v;
  sk.total_ = total;
  return sk;
}

void PlainSketch::update(std::uint64_t j, double delta) {
  check_index(j, seeds_.n, "sketch_update");
  const std::size_t s = cfg_.s;
  for (std::uint32_t i = 0; i < cfg_.d; ++i) {
    rows_[i * s + bucket_of(i, j)] += sign_of(i, j) * delta;
  }
  total_ += delta;
}

void PlainSketch::check_compatible(const PlainSketch& other) const {
  if (kind_ != other.kind_) raise(Errc::incompatible, "sketch kinds differ");
  if (cfg_ != other.cfg_) raise(Errc::incompatible, "sketch shapes differ");
  if (seeds_ != other.seeds_) raise(Errc::incompatible, "sketches use different seeds");
}

void PlainSketch::add_scaled(const PlainSketch& other, double alpha) {
  check_compatible(other);
  if (alpha == 1.0) {
    for (std::size_t c = 0; c < rows_.size(); ++c) rows_[c] += other.rows_[c];
    total_ += other.total_;
  } else {
    for (std::size_t c = 0; c < rows_.size(); ++c) rows_[c] += alpha * other.rows_[c];
    total_ += alpha * other.total_;
  }
  tracks_total_ = tracks_total_ || other.tracks_total_;
}

double PlainSketch::count_median(std::uint64_t j) const {
  if (kind_ != SketchKind::cm) raise(Errc::argument, "Count-Median needs a CM sketch");
  check_index(j, seeds_.n, "count_median");
  return median_over_rows(cfg_.d, [&](std::uint32_t i) { return cell(i, bucket_of(i, j)); });
}

double PlainSketch::count_sketch(std::uint64_t j) const {
  if (kind_ != SketchKind::cs) raise(Errc::argument, "Count-Sketch needs a CS sketch");
  check_index(j, seeds_.n, "count_sketch");
  return median_over_rows(cfg_.d, [&](std::uint32_t i) {
    return seeds_.signs[i].sign_unchecked(j) * cell(i, bucket_of(i, j));
  });
}

double PlainSketch::count_min(std::uint64_t j) const {
  if (kind_ != SketchKind::cm) raise(Errc::argument, "Count-Min needs a CM sketch");
  check_index(j, seeds_.n, "count_min");
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < cfg_.d; ++i) best = std::min(best, cell(i, bucket_of(i, j)));
  return best;
}

double PlainSketch::point(Estimator estimator, std::uint64_t j) const {
  switch (estimator) {
    case Estimator::count_median: return count_median(j);
    case Estimator::count_sketch: return count_sketch(j);
    case Estimator::count_min: return count_min(j);
  }
  raise(Errc::argument, "unknown estimator");
}

std::vector<double> PlainSketch::recover_all(Estimator estimator) const {
  std::vector<double> out(seeds_.n);
  for (std::uint64_t j = 0; j < seeds_.n; ++j) out[j] = point(estimator, j);
  return out;
}

PlainSketch sketch_apply(std::span<const double> x, SketchKind kind,
                         const SketchConfig& cfg, const SeedSet& seeds) {
  return PlainSketch::apply(x, kind, cfg, seeds);
}

PlainSketch sketch_merge(const PlainSketch& a, const PlainSketch& b) {
  PlainSketch out = a;
  out.add_scaled(b, 1.0);
  return out;
}

}  // namespace biask
