#pragma once

// In-process coordinator model. Sites and the coordinator exchange only
// Message values; every message is appended to a log so the protocol cost can
// be audited afterwards. One round is a coordinator -> sites exchange followed
// by the sites' replies.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "biask/any_sketch.hpp"
#include "biask/hashing.hpp"
#include "biask/sketch.hpp"

namespace biask {

inline constexpr std::uint32_t kCoordinator = std::numeric_limits<std::uint32_t>::max();

enum class PayloadKind : std::uint8_t { seed_set, sketch, column_sketch_matrix, candidate_pairs };

struct Message {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::uint32_t round = 0;
  PayloadKind kind = PayloadKind::seed_set;
  std::vector<std::uint8_t> payload;  // always a whole number of 8-byte words

  std::uint64_t words() const noexcept { return payload.size() / 8; }
};

class MessageLog {
 public:
  void append(const Message& m) { entries_.push_back(m); }
  const std::vector<Message>& entries() const noexcept { return entries_; }
  void clear() noexcept { entries_.clear(); }

 private:
  std::vector<Message> entries_;
};

struct ChannelWords {
  std::uint64_t up = 0;    // site -> coordinator
  std::uint64_t down = 0;  // coordinator -> site
};

struct CommReport {
  std::uint32_t rounds = 0;
  std::vector<ChannelWords> channels;  // indexed by site id
  std::uint64_t total_up = 0;
  std::uint64_t total_down = 0;
};

CommReport comm_report(const MessageLog& log, std::size_t sites);

/// Parameters every party needs to re-derive the shared hash functions.
struct SeedBroadcast {
  std::uint64_t master_seed = 0;
  std::uint64_t n = 0;
  SketchConfig cfg;
  bool load_hash = false;

  SeedSet derive() const { return derive_seed_set(master_seed, n, cfg.s, cfg.d, load_hash); }
};

std::vector<std::uint8_t> encode_seed_broadcast(const SeedBroadcast& b);
SeedBroadcast decode_seed_broadcast(std::span<const std::uint8_t> bytes);

/// A party holding local data. Its only inputs from the outside are messages.
class Site {
 public:
  /// Outlier detection: a local vector x^j.
  Site(std::uint32_t id, std::vector<double> local);
  /// Similarity join: n x width column block of A (row-major), covering global
  /// columns [first_column, first_column + width) of an N-column matrix.
  Site(std::uint32_t id, std::vector<double> block, std::uint64_t rows, std::uint64_t width,
       std::uint64_t first_column, std::uint64_t total_columns);

  std::uint32_t id() const noexcept { return id_; }
  /// Public shape metadata; the values themselves stay private.
  std::uint64_t dimension() const noexcept { return local_.size(); }
  std::uint64_t rows() const noexcept { return rows_; }
  std::uint64_t width() const noexcept { return width_; }
  std::uint64_t first_column() const noexcept { return first_column_; }
  std::uint64_t total_columns() const noexcept { return total_columns_; }

  void receive_seeds(const Message& m);
  bool has_seeds() const noexcept { return seeds_.has_value(); }
  const SeedSet& seeds() const;

  /// Bias-aware sketch of the local vector (l1 for p = 1, l2 for p = 2).
  Message upload_sketch(int p, std::uint32_t round) const;

  /// Join round 1: sketches of the n rows of A restricted to this site's columns.
  Message upload_row_sketches(int p, std::uint32_t round) const;
  /// Join round 2: from the broadcast row sketches, recover column u of A^T A
  /// for every owned u and report off-diagonal entries >= theta.
  Message upload_candidates(const Message& matrix, int p, double theta,
                            std::uint32_t round) const;

 private:
  AnySketch empty_sketch(int p) const;

  std::uint32_t id_;
  std::vector<double> local_;
  std::uint64_t rows_ = 0;
  std::uint64_t width_ = 0;
  std::uint64_t first_column_ = 0;
  std::uint64_t total_columns_ = 0;
  std::optional<SeedBroadcast> params_;
  std::optional<SeedSet> seeds_;
};

struct OutlierResult {
  std::vector<std::uint64_t> indices;  // k indices, largest deviation first
  std::vector<double> x_hat;
  double median = 0.0;                 // median of x_hat
  double threshold = 0.0;              // smallest reported deviation |x_hat_i - median|
  CommReport comm;
};

/// The k indices of largest |x_i - median(x)|, ties to the smaller index, and
/// theta(x) = the smallest of those deviations.
std::pair<std::vector<std::uint64_t>, double> top_deviations(std::span<const double> x,
                                                             std::uint64_t k);

/// Sites must all hold vectors of the same dimension n; k < n.
OutlierResult run_outlier_detection(std::vector<Site>& sites, std::uint64_t k, int p,
                                    const SketchConfig& cfg, std::uint64_t master_seed,
                                    MessageLog* log = nullptr);

struct JoinPair {
  std::uint64_t u = 0;  // u < v
  std::uint64_t v = 0;
  double estimate = 0.0;

  friend bool operator==(const JoinPair&, const JoinPair&) = default;
};

struct JoinResult {
  std::vector<JoinPair> pairs;           // sorted by (u, v), no duplicates
  std::vector<std::uint64_t> per_site;   // T^j = |H^j|
  bool theta_nonpositive = false;        // theta <= 0: every pair joins
  CommReport comm;
};

/// A is n x N row-major; its columns x_u are the vectors being joined.
/// `boundaries` = l_0 = 0 < l_1 < ... < l_kappa = N; site j owns columns
/// [l_j, l_{j+1}).
std::vector<Site> make_join_sites(std::span<const double> a, std::uint64_t n, std::uint64_t N,
                                  std::span<const std::uint64_t> boundaries);

JoinResult run_similarity_join(std::vector<Site>& sites, double theta, int p,
                               const SketchConfig& cfg, std::uint64_t master_seed,
                               MessageLog* log = nullptr);

/// Exact pair set {(u, v) : u < v, <x_u, x_v> >= theta}.
std::vector<JoinPair> exact_join(std::span<const double> a, std::uint64_t n, std::uint64_t N,
                                 double theta);

/// kappa vectors summing to x coordinate-wise. Shares are integers except the
/// last, so the sum is exact whenever x is integer valued.
std::vector<std::vector<double>> additive_shares(std::span<const double> x, std::uint32_t kappa,
                                                 std::uint64_t seed);

}  // namespace biask
