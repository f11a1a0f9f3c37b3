#include "biask/biask.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <string>
#include <variant>

#include "biask/any_sketch.hpp"
#include "biask/bench.hpp"
#include "biask/distributed.hpp"
#include "biask/error.hpp"
#include "biask/format.hpp"
#include "biask/oracles.hpp"
#include "biask/streaming.hpp"

struct biask_sketch {
  biask::AnySketch sk;
};

struct biask_stream {
  std::variant<biask::StreamingL1, biask::StreamingL2> st;
};

namespace {

thread_local std::string g_last_error;

biask_status fail(biask_status code, const char* msg) {
  g_last_error = msg;
  return code;
}

template <class Fn>
biask_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return BIASK_OK;
  } catch (const biask::Error& e) {
    return fail(static_cast<biask_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BIASK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BIASK_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) biask::raise(biask::Errc::argument, std::string(what) + " must not be null");
}

std::uint32_t depth_default(biask_algorithm a) {
  if (a == BIASK_ALGO_DYADIC) return biask::kDefaultBaselineDepth;
  return biask::default_depth(static_cast<biask::Algorithm>(a));
}

void check_algorithm(biask_algorithm a) {
  if (static_cast<int>(a) < 0 || a > BIASK_ALGO_DYADIC) {
    biask::raise(biask::Errc::argument, "unknown algorithm");
  }
}

biask::SketchConfig to_cfg(const biask_config* c, std::uint32_t default_d) {
  need(c, "config");
  const std::uint32_t d = c->d ? c->d : default_d;
  biask::SketchConfig cfg = c->s ? biask::SketchConfig::with_buckets(c->k, c->s, d)
                                 : biask::SketchConfig::from_multiplier(c->k, c->c_s, d);
  cfg.validate();
  return cfg;
}

std::optional<biask::Estimator> to_est(biask_estimator e) {
  switch (e) {
    case BIASK_EST_DEFAULT: return std::nullopt;
    case BIASK_EST_COUNT_MEDIAN: return biask::Estimator::count_median;
    case BIASK_EST_COUNT_SKETCH: return biask::Estimator::count_sketch;
    case BIASK_EST_COUNT_MIN: return biask::Estimator::count_min;
  }
  biask::raise(biask::Errc::argument, "unknown estimator");
}

biask::Norm to_norm(int p) {
  if (p == 1) return biask::Norm::l1;
  if (p == 2) return biask::Norm::l2;
  biask::raise(biask::Errc::argument, "p must be 1 or 2");
}

biask::AnySketch make_empty(biask_algorithm a, std::uint64_t n, const biask::SketchConfig& cfg,
                            std::uint64_t seed) {
  using namespace biask;
  if (n == 0) raise(Errc::config, "n must be positive");
  if (a == BIASK_ALGO_DYADIC) return DyadicSketch(n, cfg, seed);
  const SeedSet seeds = derive_seed_set(seed, n, cfg.s, cfg.d, a == BIASK_ALGO_L2SR);
  switch (a) {
    case BIASK_ALGO_L1SR: return L1Sketch(cfg, seeds);
    case BIASK_ALGO_L2SR: return L2Sketch(cfg, seeds);
    case BIASK_ALGO_CM:
    case BIASK_ALGO_CMIN: return PlainSketch(SketchKind::cm, cfg, seeds);
    case BIASK_ALGO_CS: return PlainSketch(SketchKind::cs, cfg, seeds);
    case BIASK_ALGO_L1MEAN:
    case BIASK_ALGO_L2MEAN: {
      PlainSketch p(a == BIASK_ALGO_L1MEAN ? SketchKind::cm : SketchKind::cs, cfg, seeds);
      p.set_tracks_total(true);
      return p;
    }
    default: break;
  }
  raise(Errc::argument, "unknown algorithm");
}

void fill_comm(biask_comm* comm, const biask::CommReport& r) {
  if (!comm) return;
  comm->rounds = r.rounds;
  for (std::size_t j = 0; j < r.channels.size(); ++j) {
    if (comm->up) comm->up[j] = r.channels[j].up;
    if (comm->down) comm->down[j] = r.channels[j].down;
  }
}

}  // namespace

extern "C" {

const char* biask_version(void) { return "1.0.0"; }

const char* biask_last_error(void) { return g_last_error.c_str(); }

const char* biask_status_name(biask_status status) {
  switch (status) {
    case BIASK_OK: return "ok";
    case BIASK_ERR_INTERNAL: return "internal";
    default: return biask::errc_name(static_cast<biask::Errc>(static_cast<int>(status)));
  }
}

const char* biask_algorithm_name(biask_algorithm a) {
  if (a == BIASK_ALGO_DYADIC) return "dyadic";
  if (static_cast<int>(a) < 0 || a > BIASK_ALGO_DYADIC) return "?";
  return biask::algorithm_name(static_cast<biask::Algorithm>(a));
}

biask_status biask_parse_algorithm(const char* name, biask_algorithm* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    if (std::strcmp(name, "dyadic") == 0) {
      *out = BIASK_ALGO_DYADIC;
      return;
    }
    const auto a = biask::parse_algorithm(name);
    if (!a) biask::raise(biask::Errc::config, std::string("unknown algorithm '") + name + "'");
    *out = static_cast<biask_algorithm>(*a);
  });
}

void biask_config_default(biask_config* cfg) {
  if (!cfg) return;
  cfg->k = 100;
  cfg->s = 0;
  cfg->d = 0;
  cfg->c_s = 4.0;
  cfg->master_seed = 1;
}

biask_status biask_sketch_new(biask_algorithm algorithm, uint64_t n, const biask_config* cfg,
                              biask_sketch** out) {
  return guarded([&] {
    need(out, "out");
    check_algorithm(algorithm);
    const auto c = to_cfg(cfg, depth_default(algorithm));
    *out = new biask_sketch{make_empty(algorithm, n, c, cfg->master_seed)};
  });
}

biask_status biask_sketch_build(biask_algorithm algorithm, const double* x, uint64_t n,
                                const biask_config* cfg, biask_sketch** out) {
  return guarded([&] {
    need(out, "out");
    need(x, "x");
    check_algorithm(algorithm);
    const auto c = to_cfg(cfg, depth_default(algorithm));
    std::span<const double> xs(x, n);
    if (algorithm == BIASK_ALGO_DYADIC) {
      *out = new biask_sketch{biask::DyadicSketch::build(xs, c, cfg->master_seed)};
    } else {
      *out = new biask_sketch{
          biask::sketch_for(static_cast<biask::Algorithm>(algorithm), xs, c, cfg->master_seed)};
    }
  });
}

biask_status biask_sketch_clone(const biask_sketch* sk, biask_sketch** out) {
  return guarded([&] {
    need(sk, "sketch");
    need(out, "out");
    *out = new biask_sketch{sk->sk};
  });
}

void biask_sketch_free(biask_sketch* sk) { delete sk; }

biask_status biask_sketch_update(biask_sketch* sk, uint64_t j, double delta) {
  return guarded([&] {
    need(sk, "sketch");
    biask::update(sk->sk, j, delta);
  });
}

biask_status biask_sketch_add_scaled(biask_sketch* dst, const biask_sketch* src, double alpha) {
  return guarded([&] {
    need(dst, "dst");
    need(src, "src");
    biask::add_scaled(dst->sk, src->sk, alpha);
  });
}

biask_status biask_sketch_merge(biask_sketch* dst, const biask_sketch* src) {
  return biask_sketch_add_scaled(dst, src, 1.0);
}

biask_status biask_sketch_info_get(const biask_sketch* sk, biask_sketch_info* out) {
  return guarded([&] {
    need(sk, "sketch");
    need(out, "out");
    const auto& cfg = biask::config_of(sk->sk);
    biask_sketch_info info{};
    info.kind = static_cast<biask_kind>(biask::kind_of(sk->sk));
    info.n = biask::dimension_of(sk->sk);
    info.k = cfg.k;
    info.s = cfg.s;
    info.d = cfg.d;
    info.c_s = cfg.c_s;
    info.master_seed = biask::master_seed_of(sk->sk);
    info.words = biask::sketch_words(sk->sk);
    const auto* p = std::get_if<biask::PlainSketch>(&sk->sk);
    info.has_total = p && p->tracks_total();
    *out = info;
  });
}

biask_status biask_sketch_point(const biask_sketch* sk, biask_estimator est, uint64_t j,
                                double* out) {
  return guarded([&] {
    need(sk, "sketch");
    need(out, "out");
    *out = biask::point_default(sk->sk, j, to_est(est));
  });
}

biask_status biask_sketch_recover(const biask_sketch* sk, biask_estimator est, double* out,
                                  uint64_t n) {
  return guarded([&] {
    need(sk, "sketch");
    need(out, "out");
    if (n != biask::dimension_of(sk->sk)) {
      biask::raise(biask::Errc::argument, "output length does not match the sketch dimension");
    }
    const auto x = biask::recover_default(sk->sk, to_est(est));
    std::memcpy(out, x.data(), x.size() * sizeof(double));
  });
}

biask_status biask_sketch_bias(const biask_sketch* sk, double* out) {
  return guarded([&] {
    need(sk, "sketch");
    need(out, "out");
    if (const auto* l1 = std::get_if<biask::L1Sketch>(&sk->sk)) {
      *out = l1->estimate_bias();
    } else if (const auto* l2 = std::get_if<biask::L2Sketch>(&sk->sk)) {
      *out = l2->estimate_bias(
          biask::compute_bucket_loads(l2->seeds(), l2->config(), l2->dimension()));
    } else if (const auto* p = std::get_if<biask::PlainSketch>(&sk->sk); p && p->tracks_total()) {
      *out = p->total() / static_cast<double>(p->dimension());
    } else {
      biask::raise(biask::Errc::argument, "sketch kind has no bias estimate");
    }
  });
}

biask_status biask_sketch_heavy(const biask_sketch* sk, double theta, biask_entry_fn fn,
                                void* user, uint64_t* visited) {
  return guarded([&] {
    need(sk, "sketch");
    const auto* ds = std::get_if<biask::DyadicSketch>(&sk->sk);
    if (!ds) biask::raise(biask::Errc::argument, "threshold queries need a dyadic sketch");
    biask::DyadicQueryStats stats;
    const auto hits = ds->threshold_query(theta, &stats);
    if (visited) *visited = stats.visited;
    if (fn) {
      for (const auto& h : hits) {
        if (fn(h.index, h.estimate, user)) break;
      }
    }
  });
}

biask_status biask_sketch_serialize(const biask_sketch* sk, uint8_t* buf, size_t cap,
                                    size_t* len) {
  return guarded([&] {
    need(sk, "sketch");
    need(len, "len");
    const auto bytes = biask::serialize(sk->sk);
    if (buf) {
      if (cap < bytes.size()) biask::raise(biask::Errc::argument, "buffer too small");
      std::memcpy(buf, bytes.data(), bytes.size());
    }
    *len = bytes.size();
  });
}

biask_status biask_sketch_deserialize(const uint8_t* buf, size_t len, biask_sketch** out) {
  return guarded([&] {
    need(out, "out");
    if (len) need(buf, "buf");
    *out = new biask_sketch{biask::deserialize(std::span<const std::uint8_t>(buf, len))};
  });
}

biask_status biask_sketch_save(const biask_sketch* sk, const char* path) {
  return guarded([&] {
    need(sk, "sketch");
    need(path, "path");
    biask::sketch_save(path, sk->sk);
  });
}

biask_status biask_sketch_load(const char* path, biask_sketch** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new biask_sketch{biask::sketch_load(path)};
  });
}

biask_status biask_stream_new(int p, uint64_t n, const biask_config* cfg, biask_stream** out) {
  return guarded([&] {
    need(out, "out");
    to_norm(p);
    const auto c = to_cfg(cfg, biask::kDefaultBiasDepth);
    if (n == 0) biask::raise(biask::Errc::config, "n must be positive");
    auto seeds = biask::derive_seed_set(cfg->master_seed, n, c.s, c.d, p == 2);
    if (p == 1) {
      *out = new biask_stream{biask::StreamingL1(n, c, std::move(seeds))};
    } else {
      *out = new biask_stream{biask::StreamingL2(n, c, std::move(seeds))};
    }
  });
}

void biask_stream_free(biask_stream* st) { delete st; }

biask_status biask_stream_update(biask_stream* st, uint64_t i, double delta) {
  return guarded([&] {
    need(st, "stream");
    std::visit([&](auto& s) { s.update(i, delta); }, st->st);
  });
}

biask_status biask_stream_point(const biask_stream* st, uint64_t i, double* out) {
  return guarded([&] {
    need(st, "stream");
    need(out, "out");
    *out = std::visit([&](const auto& s) { return s.point(i); }, st->st);
  });
}

biask_status biask_stream_bias(const biask_stream* st, double* out) {
  return guarded([&] {
    need(st, "stream");
    need(out, "out");
    *out = std::visit([](const auto& s) { return s.bias(); }, st->st);
  });
}

biask_status biask_gen_gaussian(uint64_t n, double b, double sigma, uint64_t m_shift,
                                double shift, uint64_t seed, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto x = biask::gen_gaussian_shifted(n, b, sigma, m_shift, shift, seed);
    std::memcpy(out, x.data(), x.size() * sizeof(double));
  });
}

biask_status biask_metrics(const double* x, const double* x_hat, uint64_t n, double* avg_error,
                           double* max_error) {
  return guarded([&] {
    need(x, "x");
    need(x_hat, "x_hat");
    const auto m = biask::compute_metrics({x, n}, {x_hat, n});
    if (avg_error) *avg_error = m.avg_error;
    if (max_error) *max_error = m.max_error;
  });
}

biask_status biask_tail_error(const double* x, uint64_t n, uint64_t k, int p, double* out) {
  return guarded([&] {
    need(x, "x");
    need(out, "out");
    *out = biask::tail_error({x, n}, k, to_norm(p)).value;
  });
}

biask_status biask_best_bias(const double* x, uint64_t n, uint64_t k, int p, double* beta,
                             double* err) {
  return guarded([&] {
    need(x, "x");
    const auto r = biask::best_bias({x, n}, k, to_norm(p));
    if (beta) *beta = r.beta;
    if (err) *err = r.err;
  });
}

biask_status biask_read_vector(const char* path, double** out, uint64_t* n) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    need(n, "n");
    const auto x = biask::read_vector(path);
    double* buf = new double[x.empty() ? 1 : x.size()];
    std::memcpy(buf, x.data(), x.size() * sizeof(double));
    *out = buf;
    *n = x.size();
  });
}

void biask_vector_free(double* v) { delete[] v; }

biask_status biask_additive_shares(const double* x, uint64_t n, uint32_t kappa, uint64_t seed,
                                   double* out) {
  return guarded([&] {
    need(x, "x");
    need(out, "out");
    const auto shares = biask::additive_shares({x, n}, kappa, seed);
    for (std::uint32_t j = 0; j < kappa; ++j) {
      std::memcpy(out + j * n, shares[j].data(), n * sizeof(double));
    }
  });
}

biask_status biask_outliers(const double* const* xs, uint32_t kappa, uint64_t n, uint64_t k,
                            int p, const biask_config* cfg, uint64_t* indices, double* median,
                            biask_comm* comm) {
  return guarded([&] {
    need(xs, "xs");
    need(indices, "indices");
    to_norm(p);
    const auto c = to_cfg(cfg, biask::kDefaultBiasDepth);
    std::vector<biask::Site> sites;
    for (std::uint32_t j = 0; j < kappa; ++j) {
      need(xs[j], "site vector");
      sites.emplace_back(j, std::vector<double>(xs[j], xs[j] + n));
    }
    const auto r = biask::run_outlier_detection(sites, k, p, c, cfg->master_seed);
    std::copy(r.indices.begin(), r.indices.end(), indices);
    if (median) *median = r.median;
    fill_comm(comm, r.comm);
  });
}

biask_status biask_simjoin(const double* a, uint64_t n, uint64_t N, const uint64_t* boundaries,
                           uint32_t kappa, double theta, int p, const biask_config* cfg,
                           biask_pair_fn fn, void* user, uint64_t* per_site, biask_comm* comm) {
  return guarded([&] {
    need(a, "a");
    need(boundaries, "boundaries");
    to_norm(p);
    const auto c = to_cfg(cfg, biask::kDefaultBiasDepth);
    auto sites = biask::make_join_sites({a, n * N}, n, N, {boundaries, kappa + std::size_t{1}});
    const auto r = biask::run_similarity_join(sites, theta, p, c, cfg->master_seed);
    if (per_site) std::copy(r.per_site.begin(), r.per_site.end(), per_site);
    fill_comm(comm, r.comm);
    if (fn) {
      for (const auto& pr : r.pairs) {
        if (fn(pr.u, pr.v, pr.estimate, user)) break;
      }
    }
  });
}

biask_status biask_sweep(const biask_sweep_config* cfg, const char* path, uint64_t* rows) {
  return guarded([&] {
    need(cfg, "config");
    need(path, "path");
    biask::ExperimentConfig ec;
    ec.algorithms.clear();
    for (std::uint32_t i = 0; i < cfg->n_algorithms; ++i) {
      const biask_algorithm a = cfg->algorithms[i];
      if (static_cast<int>(a) < 0 || a >= BIASK_ALGO_DYADIC) {
        biask::raise(biask::Errc::config, "sweeps cover the recovery algorithms only");
      }
      ec.algorithms.push_back(static_cast<biask::Algorithm>(a));
    }
    ec.n = cfg->n;
    ec.k = cfg->k;
    ec.c_s = cfg->c_s;
    if (cfg->d) ec.d = cfg->d;
    ec.master_seed = cfg->master_seed;
    ec.repeats = cfg->repeats;
    ec.data = {cfg->b, cfg->sigma, cfg->m_shift, cfg->shift};
    if (cfg->s_values) ec.s_values.assign(cfg->s_values, cfg->s_values + cfg->n_s_values);
    if (cfg->d_values) ec.d_values.assign(cfg->d_values, cfg->d_values + cfg->n_d_values);
    ec.timings = cfg->timings != 0;
    const auto result = biask::run_sweep(ec);
    if (std::strcmp(path, "-") == 0) {
      biask::write_csv(std::cout, result);
      std::cout.flush();
    } else {
      std::ofstream out(path, std::ios::trunc);
      if (!out) biask::raise(biask::Errc::io, std::string("cannot open ") + path);
      biask::write_csv(out, result);
      if (!out) biask::raise(biask::Errc::io, std::string("write failed for ") + path);
    }
    if (rows) *rows = result.size();
  });
}

}  // extern "C"
