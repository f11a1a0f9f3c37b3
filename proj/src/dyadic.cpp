#include "biask/dyadic.hpp"

#include <bit>
#include <string>

#include "biask/error.hpp"

namespace biask {

SeedSet dyadic_level_seeds(std::uint64_t master_seed, std::uint32_t level,
                           const SketchConfig& cfg) {
  return derive_seed_set(derive_seed(master_seed, SeedRole::dyadic_level, level),
                         std::uint64_t{1} << level, cfg.s, cfg.d, false);
}

DyadicSketch::DyadicSketch(std::uint64_t n, const SketchConfig& cfg, std::uint64_t master_seed)
    : n_(n), cfg_(cfg), master_seed_(master_seed) {
  if (n == 0) raise(Errc::config, "dyadic sketch needs n >= 1");
  if (n > (std::uint64_t{1} << 62)) raise(Errc::config, "dyadic sketch dimension too large");
  cfg_.validate();
  n_padded_ = std::bit_ceil(n);
  depth_ = static_cast<std::uint32_t>(std::countr_zero(n_padded_));
  levels_.reserve(depth_);
  for (std::uint32_t l = 1; l <= depth_; ++l) {
    Level lv;
    lv.level = l;
    const std::uint64_t size = std::uint64_t{1} << l;
    if (size <= cfg_.s) {
      lv.exact.assign(size, 0.0);
    } else {
      lv.sketch.emplace(SketchKind::cm, cfg_, dyadic_level_seeds(master_seed, l, cfg_));
    }
    levels_.push_back(std::move(lv));
  }
}

DyadicSketch DyadicSketch::build(std::span<const double> x, const SketchConfig& cfg,
                                 std::uint64_t master_seed) {
  DyadicSketch ds(x.size(), cfg, master_seed);
  std::vector<double> v(ds.n_padded_, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    v[i] = x[i];
    ds.saw_negative_ = ds.saw_negative_ || x[i] < 0.0;
  }
  for (std::uint32_t l = ds.depth_; l >= 1; --l) {
    Level& lv = ds.levels_[l - 1];
    if (lv.is_exact()) {
      lv.exact = v;
    } else {
      lv.sketch = PlainSketch::apply(v, SketchKind::cm, cfg, lv.sketch->seeds());
    }
    std::vector<double> parent(v.size() / 2);
    for (std::size_t j = 0; j < parent.size(); ++j) parent[j] = v[2 * j] + v[2 * j + 1];
    v = std::move(parent);
  }
  ds.total_ = v.front();
  return ds;
}

void DyadicSketch::update(std::uint64_t i, double delta) {
  check_index(i, n_, "dyadic_update");
  if (delta < 0.0) saw_negative_ = true;
  for (Level& lv : levels_) {
    const std::uint64_t j = i >> (depth_ - lv.level);
    if (lv.is_exact()) {
      lv.exact[j] += delta;
    } else {
      lv.sketch->update(j, delta);
    }
  }
  total_ += delta;
}

void DyadicSketch::add_scaled(const DyadicSketch& other, double alpha) {
  if (n_ != other.n_ || cfg_ != other.cfg_ || master_seed_ != other.master_seed_) {
    raise(Errc::incompatible, "dyadic sketches differ in shape or seed");
  }
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    Level& lv = levels_[l];
    const Level& ov = other.levels_[l];
    if (lv.is_exact()) {
      for (std::size_t j = 0; j < lv.exact.size(); ++j) lv.exact[j] += alpha * ov.exact[j];
    } else {
      lv.sketch->add_scaled(*ov.sketch, alpha);
    }
  }
  total_ += alpha * other.total_;
  saw_negative_ = saw_negative_ || other.saw_negative_ || alpha < 0.0;
}

double DyadicSketch::estimate(std::uint32_t level, std::uint64_t j) const {
  if (level > depth_) raise(Errc::index, "dyadic level out of range");
  if (level == 0) {
    check_index(j, 1, "dyadic_estimate");
    return total_;
  }
  const Level& lv = levels_[level - 1];
  check_index(j, std::uint64_t{1} << level, "dyadic_estimate");
  return lv.is_exact() ? lv.exact[j] : lv.sketch->count_min(j);
}

std::vector<HeavyEntry> DyadicSketch::threshold_query(double theta,
                                                      DyadicQueryStats* stats) const {
  if (!(theta > 0.0)) raise(Errc::argument, "threshold must be positive");
  DyadicQueryStats local;
  local.visited = 1;
  std::vector<HeavyEntry> frontier;
  if (total_ >= theta) frontier.push_back({0, total_});
  for (std::uint32_t l = 1; l <= depth_ && !frontier.empty(); ++l) {
    std::vector<HeavyEntry> next;
    const std::uint32_t shift = depth_ - l;
    for (const HeavyEntry& node : frontier) {
      for (std::uint64_t child = 2 * node.index; child <= 2 * node.index + 1; ++child) {
        // Blocks entirely inside the zero padding are never expanded.
        if ((child << shift) >= n_) continue;
        ++local.visited;
        const double e = estimate(l, child);
        if (e >= theta) next.push_back({child, e});
      }
    }
    frontier = std::move(next);
  }
  if (stats) *stats = local;
  return frontier;
}

}  // namespace biask
