#include "biask/streaming.hpp"

#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>
#include <utility>

#include "biask/error.hpp"

namespace biask {

namespace {

std::vector<std::int64_t> index_nonempty(const BucketLoads& loads) {
  std::vector<std::int64_t> node(loads.pi.size(), -1);
  std::int64_t next = 0;
  for (std::size_t b = 0; b < loads.pi.size(); ++b) {
    if (loads.pi[b] > 0) node[b] = next++;
  }
  return node;
}

std::vector<double> tracked_loads(const BucketLoads& loads) {
  std::vector<double> out;
  for (std::uint64_t p : loads.pi) {
    if (p > 0) out.push_back(static_cast<double>(p));
  }
  return out;
}

BucketLoads loads_for_l2(std::uint64_t n, const SketchConfig& cfg, const SeedSet& seeds) {
  cfg.validate_bias_window();
  if (!seeds.load_hash) raise(Errc::config, "streaming l2 needs a load hash");
  return compute_bucket_loads(seeds, cfg, n);
}

}  // namespace

// ---------------------------------------------------------------------------

StreamingL2::StreamingL2(std::uint64_t n, const SketchConfig& cfg, SeedSet seeds)
    : loads_(loads_for_l2(n, cfg, seeds)),
      cs_(SketchKind::cs, cfg, std::move(seeds)),
      node_of_bucket_(index_nonempty(loads_)),
      heap_(tracked_loads(loads_), cfg.k) {}

void StreamingL2::update(std::uint64_t i, double delta) {
  cs_.update(i, delta);
  const std::uint64_t b = cs_.seeds().load_hash->bucket_unchecked(i);
  heap_.update(static_cast<std::uint32_t>(node_of_bucket_[b]), delta);
}

double StreamingL2::point(std::uint64_t i) const {
  check_index(i, dimension(), "stream_l2_point");
  const double beta = heap_.query();
  return median_over_rows(cs_.depth(), [&](std::uint32_t t) {
           const std::uint64_t b = cs_.bucket_of(t, i);
           return debias_cs(cs_.cell(t, b), loads_.signed_load(t, b), cs_.sign_of(t, i), beta);
         }) +
         beta;
}

// ---------------------------------------------------------------------------

struct StreamingL1::OrderedSamples {
  // (value, slot) with order statistics; slots disambiguate equal values.
  using Tree = __gnu_pbds::tree<std::pair<double, std::uint32_t>, __gnu_pbds::null_type,
                                std::less<>, __gnu_pbds::rb_tree_tag,
                                __gnu_pbds::tree_order_statistics_node_update>;
  Tree tree;
};

StreamingL1::StreamingL1(std::uint64_t n, const SketchConfig& cfg, SeedSet seeds)
    : cm_(SketchKind::cm, cfg, std::move(seeds)),
      loads_(compute_bucket_loads(cm_.seeds(), cfg, n)),
      positions_(sample_indices(cm_.seeds().sampler_seed, n, l1_sample_count(n))),
      values_(positions_.size(), 0.0),
      ordered_(std::make_unique<OrderedSamples>()) {
  for (std::uint32_t slot = 0; slot < positions_.size(); ++slot) {
    slots_of_[positions_[slot]].push_back(slot);
    ordered_->tree.insert({0.0, slot});
  }
}

StreamingL1::~StreamingL1() = default;
StreamingL1::StreamingL1(StreamingL1&&) noexcept = default;
StreamingL1& StreamingL1::operator=(StreamingL1&&) noexcept = default;

void StreamingL1::update(std::uint64_t i, double delta) {
  cm_.update(i, delta);
  const auto it = slots_of_.find(i);
  if (it == slots_of_.end()) return;
  for (std::uint32_t slot : it->second) {
    ordered_->tree.erase({values_[slot], slot});
    values_[slot] += delta;
    ordered_->tree.insert({values_[slot], slot});
  }
}

double StreamingL1::bias() const {
  const auto& tree = ordered_->tree;
  const std::size_t t = tree.size();
  if (t % 2 == 1) return tree.find_by_order(t / 2)->first;
  return (tree.find_by_order(t / 2 - 1)->first + tree.find_by_order(t / 2)->first) / 2.0;
}

double StreamingL1::point(std::uint64_t i) const {
  check_index(i, dimension(), "stream_l1_point");
  const double beta = bias();
  return median_over_rows(cm_.depth(), [&](std::uint32_t t) {
           const std::uint64_t b = cm_.bucket_of(t, i);
           return debias_cm(cm_.cell(t, b), loads_.count(t, b), beta);
         }) +
         beta;
}

}  // namespace biask
