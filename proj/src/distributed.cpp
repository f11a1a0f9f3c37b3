#include "biask/distributed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "biask/error.hpp"
#include "biask/format.hpp"

namespace biask {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, int width) {
  if (at + static_cast<std::size_t>(width) > in.size()) {
    throw FormatError(at, "truncated message payload");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{in[at + i]} << (8 * i);
  return v;
}

void pad_to_word(std::vector<std::uint8_t>& bytes) {
  while (bytes.size() % 8 != 0) bytes.push_back(0);
}

void check_p(int p) {
  if (p != 1 && p != 2) raise(Errc::argument, "p must be 1 or 2");
}

AnySketch empty_for(int p, const SketchConfig& cfg, const SeedSet& seeds) {
  if (p == 1) return L1Sketch(cfg, seeds);
  return L2Sketch(cfg, seeds);
}

AnySketch build_for(int p, std::span<const double> x, const SketchConfig& cfg,
                    const SeedSet& seeds) {
  if (p == 1) return L1Sketch::build(x, cfg, seeds);
  return L2Sketch::build(x, cfg, seeds);
}

std::vector<double> recover_any(const AnySketch& sk) {
  if (const auto* l1 = std::get_if<L1Sketch>(&sk)) return l1->recover();
  return std::get<L2Sketch>(sk).recover();
}

/// Byte length of one serialized sketch and its word-aligned stride.
std::pair<std::size_t, std::size_t> blob_layout(int p, const SketchConfig& cfg,
                                                const SeedSet& seeds) {
  const std::size_t bytes = serialize(empty_for(p, cfg, seeds)).size();
  return {bytes, words_for_bytes(bytes) * 8};
}

void append_blob(std::vector<std::uint8_t>& out, const AnySketch& sk) {
  const auto bytes = serialize(sk);
  out.insert(out.end(), bytes.begin(), bytes.end());
  pad_to_word(out);
}

std::vector<AnySketch> split_blobs(std::span<const std::uint8_t> payload, std::uint64_t count,
                                   std::pair<std::size_t, std::size_t> layout) {
  const auto [bytes, stride] = layout;
  if (payload.size() != count * stride) {
    throw FormatError(payload.size(), "sketch matrix payload has the wrong size");
  }
  std::vector<AnySketch> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(deserialize(payload.subspan(i * stride, bytes)));
  }
  return out;
}

Message send(MessageLog& log, std::uint32_t from, std::uint32_t to, std::uint32_t round,
             PayloadKind kind, std::vector<std::uint8_t> payload) {
  Message m;
  m.from = from;
  m.to = to;
  m.round = round;
  m.kind = kind;
  m.payload = std::move(payload);
  log.append(m);
  return m;
}

void broadcast(MessageLog& log, std::vector<Site>& sites, const SeedBroadcast& params,
               std::uint32_t round) {
  const auto payload = encode_seed_broadcast(params);
  for (Site& site : sites) {
    site.receive_seeds(send(log, kCoordinator, site.id(), round, PayloadKind::seed_set, payload));
  }
}

void check_site_ids(const std::vector<Site>& sites) {
  if (sites.empty()) raise(Errc::argument, "at least one site is required");
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (sites[j].id() != j) raise(Errc::argument, "site ids must be 0, 1, ..., kappa - 1");
  }
}

}  // namespace

CommReport comm_report(const MessageLog& log, std::size_t sites) {
  CommReport r;
  r.channels.assign(sites, {});
  for (const Message& m : log.entries()) {
    r.rounds = std::max(r.rounds, m.round);
    if (m.from == kCoordinator) {
      if (m.to >= sites) raise(Errc::argument, "message to unknown site");
      r.channels[m.to].down += m.words();
      r.total_down += m.words();
    } else {
      if (m.from >= sites) raise(Errc::argument, "message from unknown site");
      r.channels[m.from].up += m.words();
      r.total_up += m.words();
    }
  }
  return r;
}

// master_seed u64 | n u64 | s u32 | d u32 | k u32 | flags u32 | c_s f64
std::vector<std::uint8_t> encode_seed_broadcast(const SeedBroadcast& b) {
  std::vector<std::uint8_t> out;
  put_u64(out, b.master_seed);
  put_u64(out, b.n);
  put_u32(out, b.cfg.s);
  put_u32(out, b.cfg.d);
  put_u32(out, b.cfg.k);
  put_u32(out, b.load_hash ? 1u : 0u);
  put_u64(out, std::bit_cast<std::uint64_t>(b.cfg.c_s));
  return out;
}

SeedBroadcast decode_seed_broadcast(std::span<const std::uint8_t> in) {
  if (in.size() != 40) throw FormatError(std::min<std::size_t>(in.size(), 40), "bad seed payload size");
  SeedBroadcast b;
  b.master_seed = get_le(in, 0, 8);
  b.n = get_le(in, 8, 8);
  b.cfg.s = static_cast<std::uint32_t>(get_le(in, 16, 4));
  b.cfg.d = static_cast<std::uint32_t>(get_le(in, 20, 4));
  b.cfg.k = static_cast<std::uint32_t>(get_le(in, 24, 4));
  const std::uint64_t flags = get_le(in, 28, 4);
  if (flags > 1) throw FormatError(28, "unknown seed flags");
  b.load_hash = flags == 1;
  b.cfg.c_s = std::bit_cast<double>(get_le(in, 32, 8));
  return b;
}

Site::Site(std::uint32_t id, std::vector<double> local) : id_(id), local_(std::move(local)) {}

Site::Site(std::uint32_t id, std::vector<double> block, std::uint64_t rows, std::uint64_t width,
           std::uint64_t first_column, std::uint64_t total_columns)
    : id_(id),
      local_(std::move(block)),
      rows_(rows),
      width_(width),
      first_column_(first_column),
      total_columns_(total_columns) {
  if (local_.size() != rows * width) raise(Errc::argument, "column block has the wrong size");
  if (first_column + width > total_columns) raise(Errc::argument, "column block out of range");
}

void Site::receive_seeds(const Message& m) {
  if (m.kind != PayloadKind::seed_set || m.to != id_) {
    raise(Errc::argument, "site expected its seed message");
  }
  params_ = decode_seed_broadcast(m.payload);
  seeds_ = params_->derive();
}

const SeedSet& Site::seeds() const {
  if (!seeds_) raise(Errc::argument, "site has not received seeds");
  return *seeds_;
}

AnySketch Site::empty_sketch(int p) const {
  return empty_for(p, params_->cfg, seeds());
}

Message Site::upload_sketch(int p, std::uint32_t round) const {
  check_p(p);
  const SeedSet& s = seeds();
  if (s.n != local_.size()) raise(Errc::argument, "local vector dimension mismatch");
  Message m;
  m.from = id_;
  m.to = kCoordinator;
  m.round = round;
  m.kind = PayloadKind::sketch;
  append_blob(m.payload, build_for(p, local_, params_->cfg, s));
  return m;
}

Message Site::upload_row_sketches(int p, std::uint32_t round) const {
  check_p(p);
  const SeedSet& s = seeds();
  if (s.n != total_columns_) raise(Errc::argument, "seed dimension does not match N");
  Message m;
  m.from = id_;
  m.to = kCoordinator;
  m.round = round;
  m.kind = PayloadKind::column_sketch_matrix;
  std::vector<double> row(total_columns_, 0.0);
  for (std::uint64_t i = 0; i < rows_; ++i) {
    for (std::uint64_t c = 0; c < width_; ++c) row[first_column_ + c] = local_[i * width_ + c];
    append_blob(m.payload, build_for(p, row, params_->cfg, s));
  }
  return m;
}

Message Site::upload_candidates(const Message& matrix, int p, double theta,
                                std::uint32_t round) const {
  check_p(p);
  if (matrix.kind != PayloadKind::column_sketch_matrix || matrix.to != id_) {
    raise(Errc::argument, "site expected the sketch matrix");
  }
  const SeedSet& s = seeds();
  const auto rows =
      split_blobs(matrix.payload, rows_, blob_layout(p, params_->cfg, s));

  std::map<std::pair<std::uint64_t, std::uint64_t>, double> found;
  for (std::uint64_t c = 0; c < width_; ++c) {
    const std::uint64_t u = first_column_ + c;
    AnySketch combined = empty_sketch(p);
    for (std::uint64_t i = 0; i < rows_; ++i) add_scaled(combined, rows[i], local_[i * width_ + c]);
    const std::vector<double> col = recover_any(combined);
    for (std::uint64_t v = 0; v < total_columns_; ++v) {
      if (v == u || !(col[v] >= theta)) continue;
      found.emplace(std::minmax(u, v), col[v]);
    }
  }

  Message m;
  m.from = id_;
  m.to = kCoordinator;
  m.round = round;
  m.kind = PayloadKind::candidate_pairs;
  put_u64(m.payload, found.size());
  for (const auto& [key, est] : found) {
    put_u64(m.payload, key.first);
    put_u64(m.payload, key.second);
    put_u64(m.payload, std::bit_cast<std::uint64_t>(est));
  }
  return m;
}

std::pair<std::vector<std::uint64_t>, double> top_deviations(std::span<const double> x,
                                                             std::uint64_t k) {
  if (k >= x.size()) raise(Errc::degenerate, "outlier count must be below the dimension");
  const double med = median_of(x);
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);
  std::vector<std::uint64_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::uint64_t a, std::uint64_t b) {
                      return dev[a] != dev[b] ? dev[a] > dev[b] : a < b;
                    });
  idx.resize(k);
  const double theta = k == 0 ? 0.0 : dev[idx.back()];
  return {std::move(idx), theta};
}

OutlierResult run_outlier_detection(std::vector<Site>& sites, std::uint64_t k, int p,
                                    const SketchConfig& cfg, std::uint64_t master_seed,
                                    MessageLog* log) {
  check_p(p);
  check_site_ids(sites);
  MessageLog local_log;
  MessageLog& lg = log ? *log : local_log;

  // The dimension is common knowledge; it is what the seeds are derived for.
  const std::uint64_t n = sites.front().dimension();
  for (const Site& site : sites) {
    if (site.dimension() != n) raise(Errc::argument, "sites hold vectors of different dimensions");
  }
  if (k >= n) raise(Errc::degenerate, "outlier count must be below the dimension");

  SeedBroadcast params{master_seed, n, cfg, p == 2};
  const SeedSet seeds = params.derive();
  if (p == 2) cfg.validate_bias_window();

  broadcast(lg, sites, params, 1);
  std::optional<AnySketch> merged;
  for (const Site& site : sites) {
    const Message m = site.upload_sketch(p, 1);
    lg.append(m);
    const auto [bytes, stride] = blob_layout(p, cfg, seeds);
    if (m.payload.size() != stride) throw FormatError(m.payload.size(), "bad sketch message size");
    AnySketch sk = deserialize(std::span<const std::uint8_t>(m.payload).first(bytes));
    if (!merged) {
      merged = std::move(sk);
    } else {
      add_scaled(*merged, sk, 1.0);
    }
  }

  OutlierResult res;
  res.x_hat = recover_any(*merged);
  res.median = median_of(res.x_hat);
  auto [idx, theta] = top_deviations(res.x_hat, k);
  res.indices = std::move(idx);
  res.threshold = theta;
  res.comm = comm_report(lg, sites.size());
  return res;
}

std::vector<Site> make_join_sites(std::span<const double> a, std::uint64_t n, std::uint64_t N,
                                  std::span<const std::uint64_t> boundaries) {
  if (a.size() != n * N) raise(Errc::argument, "matrix size does not match n x N");
  if (boundaries.size() < 2 || boundaries.front() != 0 || boundaries.back() != N) {
    raise(Errc::argument, "column boundaries must run from 0 to N");
  }
  std::vector<Site> sites;
  for (std::size_t j = 0; j + 1 < boundaries.size(); ++j) {
    const std::uint64_t lo = boundaries[j];
    const std::uint64_t hi = boundaries[j + 1];
    if (hi <= lo) raise(Errc::argument, "column boundaries must be strictly increasing");
    std::vector<double> block(n * (hi - lo));
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::uint64_t c = lo; c < hi; ++c) block[i * (hi - lo) + (c - lo)] = a[i * N + c];
    }
    sites.emplace_back(static_cast<std::uint32_t>(j), std::move(block), n, hi - lo, lo, N);
  }
  return sites;
}

JoinResult run_similarity_join(std::vector<Site>& sites, double theta, int p,
                               const SketchConfig& cfg, std::uint64_t master_seed,
                               MessageLog* log) {
  check_p(p);
  check_site_ids(sites);
  MessageLog local_log;
  MessageLog& lg = log ? *log : local_log;

  const std::uint64_t N = sites.front().total_columns();
  const std::uint64_t n = sites.front().rows();
  std::uint64_t next = 0;
  for (const Site& site : sites) {
    if (site.total_columns() != N || site.rows() != n || site.first_column() != next) {
      raise(Errc::argument, "sites do not partition the columns of one matrix");
    }
    next += site.width();
  }
  if (next != N) raise(Errc::argument, "sites do not cover all columns");
  if (p == 2) cfg.validate_bias_window();

  JoinResult res;
  res.theta_nonpositive = theta <= 0.0;

  SeedBroadcast params{master_seed, N, cfg, p == 2};
  const SeedSet seeds = params.derive();
  const auto layout = blob_layout(p, cfg, seeds);

  // Round 1: sum the per-site sketches of every row of A.
  broadcast(lg, sites, params, 1);
  std::vector<AnySketch> rows;
  for (const Site& site : sites) {
    const Message m = site.upload_row_sketches(p, 1);
    lg.append(m);
    auto part = split_blobs(m.payload, n, layout);
    if (rows.empty()) {
      rows = std::move(part);
    } else {
      for (std::uint64_t i = 0; i < n; ++i) add_scaled(rows[i], part[i], 1.0);
    }
  }

  // Round 2: broadcast the summed sketches, collect candidate pairs.
  std::vector<std::uint8_t> matrix;
  for (const AnySketch& sk : rows) append_blob(matrix, sk);
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> all;
  for (Site& site : sites) {
    const Message down =
        send(lg, kCoordinator, site.id(), 2, PayloadKind::column_sketch_matrix, matrix);
    const Message up = site.upload_candidates(down, p, theta, 2);
    lg.append(up);
    const std::uint64_t count = get_le(up.payload, 0, 8);
    if (up.payload.size() != 8 + 24 * count) {
      throw FormatError(up.payload.size(), "bad candidate payload size");
    }
    res.per_site.push_back(count);
    for (std::uint64_t t = 0; t < count; ++t) {
      const std::size_t at = 8 + 24 * t;
      const std::uint64_t u = get_le(up.payload, at, 8);
      const std::uint64_t v = get_le(up.payload, at + 8, 8);
      const double est = std::bit_cast<double>(get_le(up.payload, at + 16, 8));
      all.emplace(std::make_pair(u, v), est);
    }
  }
  for (const auto& [key, est] : all) res.pairs.push_back({key.first, key.second, est});
  res.comm = comm_report(lg, sites.size());
  return res;
}

std::vector<JoinPair> exact_join(std::span<const double> a, std::uint64_t n, std::uint64_t N,
                                 double theta) {
  if (a.size() != n * N) raise(Errc::argument, "matrix size does not match n x N");
  std::vector<JoinPair> out;
  for (std::uint64_t u = 0; u < N; ++u) {
    for (std::uint64_t v = u + 1; v < N; ++v) {
      double dot = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) dot += a[i * N + u] * a[i * N + v];
      if (dot >= theta) out.push_back({u, v, dot});
    }
  }
  return out;
}

std::vector<std::vector<double>> additive_shares(std::span<const double> x, std::uint32_t kappa,
                                                 std::uint64_t seed) {
  if (kappa == 0) raise(Errc::argument, "kappa must be positive");
  std::mt19937_64 rng(derive_seed(seed, SeedRole::dataset, kappa));
  std::uniform_int_distribution<int> share(-1000, 1000);
  std::vector<std::vector<double>> out(kappa, std::vector<double>(x.size(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    double rest = x[i];
    for (std::uint32_t j = 0; j + 1 < kappa; ++j) {
      const double v = share(rng);
      out[j][i] = v;
      rest -= v;
    }
    out[kappa - 1][i] = rest;
  }
  return out;
}

}  // namespace biask
