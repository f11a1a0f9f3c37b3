#include "biask/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "biask/error.hpp"
#include "biask/format.hpp"

namespace biask {

std::vector<double> gen_gaussian(std::uint64_t n, double b, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) raise(Errc::config, "sigma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(b, sigma);
  std::vector<double> x(n);
  for (double& v : x) v = normal(rng);
  return x;
}

std::vector<std::uint64_t> shifted_positions(std::uint64_t n, std::uint64_t m_shift,
                                             std::uint64_t seed) {
  if (m_shift > n) raise(Errc::config, "m_shift exceeds n");
  std::mt19937_64 rng(derive_seed(seed, SeedRole::sample, 1));
  std::vector<std::uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  for (std::uint64_t i = 0; i < m_shift; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(m_shift);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<double> gen_gaussian_shifted(std::uint64_t n, double b, double sigma,
                                         std::uint64_t m_shift, double shift,
                                         std::uint64_t seed) {
  std::vector<double> x = gen_gaussian(n, b, sigma, seed);
  for (std::uint64_t i : shifted_positions(n, m_shift, seed)) x[i] += shift;
  return x;
}

Metrics compute_metrics(std::span<const double> x, std::span<const double> x_hat) {
  if (x.size() != x_hat.size()) raise(Errc::argument, "metrics: dimension mismatch");
  Metrics m;
  if (x.empty()) return m;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::abs(x[i] - x_hat[i]);
    sum += e;
    m.max_error = std::max(m.max_error, e);
  }
  m.avg_error = sum / static_cast<double>(x.size());
  // Rounding in the division may push a constant error vector's mean above its max.
  m.avg_error = std::min(m.avg_error, m.max_error);
  return m;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  const char* begin = text.c_str();
  const char* p = begin;
  const char* end = begin + text.size();
  while (true) {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p == end) break;
    char* stop = nullptr;
    const double v = std::strtod(p, &stop);
    if (stop == p || (stop < end && !std::isspace(static_cast<unsigned char>(*stop)))) {
      throw FormatError(static_cast<std::size_t>(p - begin), "expected a real number");
    }
    if (!std::isfinite(v)) {
      throw FormatError(static_cast<std::size_t>(p - begin), "non-finite value");
    }
    out.push_back(v);
    p = stop;
  }
  return out;
}

std::vector<double> read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_vector(buf.str());
}

void write_vector(std::ostream& out, std::span<const double> x) {
  for (double v : x) out << format_real(v) << '\n';
}

const char* algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::l1sr: return "l1sr";
    case Algorithm::l2sr: return "l2sr";
    case Algorithm::cm: return "cm";
    case Algorithm::cs: return "cs";
    case Algorithm::cmin: return "cmin";
    case Algorithm::l1mean: return "l1mean";
    case Algorithm::l2mean: return "l2mean";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::l1sr, Algorithm::l2sr, Algorithm::cm, Algorithm::cs,
                      Algorithm::cmin, Algorithm::l1mean, Algorithm::l2mean}) {
    if (name == algorithm_name(a)) return a;
  }
  return std::nullopt;
}

std::uint32_t default_depth(Algorithm a) noexcept {
  return a == Algorithm::l1sr || a == Algorithm::l2sr ? kDefaultBiasDepth : kDefaultBaselineDepth;
}

bool needs_bias_window(Algorithm a) noexcept { return a == Algorithm::l2sr; }

AnySketch sketch_for(Algorithm a, std::span<const double> x, const SketchConfig& cfg,
                     std::uint64_t master_seed) {
  if (x.empty()) raise(Errc::config, "cannot sketch an empty vector");
  const SeedSet seeds = derive_seed_set(master_seed, x.size(), cfg.s, cfg.d, a == Algorithm::l2sr);
  switch (a) {
    case Algorithm::l1sr: return L1Sketch::build(x, cfg, seeds);
    case Algorithm::l2sr: return L2Sketch::build(x, cfg, seeds);
    case Algorithm::cm:
    case Algorithm::cmin: return PlainSketch::apply(x, SketchKind::cm, cfg, seeds);
    case Algorithm::cs: return PlainSketch::apply(x, SketchKind::cs, cfg, seeds);
    case Algorithm::l1mean:
    case Algorithm::l2mean: {
      PlainSketch sk = PlainSketch::apply(
          x, a == Algorithm::l1mean ? SketchKind::cm : SketchKind::cs, cfg, seeds);
      sk.set_tracks_total(true);
      return sk;
    }
  }
  raise(Errc::argument, "unknown algorithm");
}

std::vector<double> recover_for(Algorithm a, const AnySketch& sk) {
  switch (a) {
    case Algorithm::l1sr: return std::get<L1Sketch>(sk).recover();
    case Algorithm::l2sr: return std::get<L2Sketch>(sk).recover();
    case Algorithm::cm: return std::get<PlainSketch>(sk).recover_all(Estimator::count_median);
    case Algorithm::cs: return std::get<PlainSketch>(sk).recover_all(Estimator::count_sketch);
    case Algorithm::cmin: return std::get<PlainSketch>(sk).recover_all(Estimator::count_min);
    case Algorithm::l1mean:
    case Algorithm::l2mean: {
      const auto& p = std::get<PlainSketch>(sk);
      return mean_bias_recover(p, p.total(), p.dimension());
    }
  }
  raise(Errc::argument, "unknown algorithm");
}

namespace {
Estimator natural_estimator(const PlainSketch& p, std::optional<Estimator> plain) {
  if (plain) return *plain;
  return p.kind() == SketchKind::cm ? Estimator::count_median : Estimator::count_sketch;
}
}  // namespace

std::vector<double> recover_default(const AnySketch& sk, std::optional<Estimator> plain) {
  if (const auto* l1 = std::get_if<L1Sketch>(&sk)) return l1->recover();
  if (const auto* l2 = std::get_if<L2Sketch>(&sk)) return l2->recover();
  if (const auto* p = std::get_if<PlainSketch>(&sk)) {
    if (p->tracks_total() && !plain) return mean_bias_recover(*p, p->total(), p->dimension());
    return p->recover_all(natural_estimator(*p, plain));
  }
  raise(Errc::argument, "dyadic sketches answer threshold and point queries only");
}

double point_default(const AnySketch& sk, std::uint64_t j, std::optional<Estimator> plain) {
  if (const auto* l1 = std::get_if<L1Sketch>(&sk)) return l1->point(j);
  if (const auto* l2 = std::get_if<L2Sketch>(&sk)) return l2->point(j);
  if (const auto* p = std::get_if<PlainSketch>(&sk)) {
    if (p->tracks_total() && !plain) {
      check_index(j, p->dimension(), "point");
      return mean_bias_recover(*p, p->total(), p->dimension())[j];
    }
    return p->point(natural_estimator(*p, plain), j);
  }
  const auto& ds = std::get<DyadicSketch>(sk);
  check_index(j, ds.dimension(), "point");
  return ds.estimate(ds.levels(), j);
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) raise(Errc::config, "no algorithm selected");
  if (n == 0) raise(Errc::config, "n must be positive");
  if (k == 0) raise(Errc::config, "k must be positive");
  if (!(c_s > 0.0)) raise(Errc::config, "c_s must be positive");
  if (repeats == 0) raise(Errc::config, "repeats must be positive");
  if (!(data.sigma > 0.0)) raise(Errc::config, "sigma must be positive");
  if (data.m_shift > n) raise(Errc::config, "m_shift exceeds n");
  if (d && *d == 0) raise(Errc::config, "d must be positive");
  for (std::uint32_t dv : d_values) {
    if (dv == 0) raise(Errc::config, "d must be positive");
  }
  std::vector<std::uint32_t> ss = s_values;
  if (ss.empty()) ss.push_back(SketchConfig::from_multiplier(k, c_s, 1).s);
  for (std::uint32_t s : ss) {
    if (s == 0) raise(Errc::config, "s must be positive");
    for (Algorithm a : algorithms) {
      if (needs_bias_window(a) && std::uint64_t{s} < 4ull * k) {
        raise(Errc::config, std::string(algorithm_name(a)) + " needs s >= 4k (s = " +
                                std::to_string(s) + ", k = " + std::to_string(k) + ")");
      }
    }
  }
}

std::vector<double> sweep_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  return gen_gaussian_shifted(cfg.n, cfg.data.b, cfg.data.sigma, cfg.data.m_shift,
                              cfg.data.shift, derive_seed(seed, SeedRole::dataset, 0));
}

MetricsRow run_cell(const ExperimentConfig& cfg, Algorithm a, std::span<const double> x,
                    std::uint32_t s, std::uint32_t d, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const SketchConfig sc = SketchConfig::with_buckets(cfg.k, s, d);
  const std::uint64_t sketch_seed = derive_seed(seed, SeedRole::sketch, 0);

  const auto t0 = clock::now();
  const AnySketch sk = sketch_for(a, x, sc, sketch_seed);
  const auto t1 = clock::now();
  const std::vector<double> x_hat = recover_for(a, sk);
  const auto t2 = clock::now();

  const Metrics m = compute_metrics(x, x_hat);
  MetricsRow row;
  row.algorithm = a;
  row.n = x.size();
  row.k = cfg.k;
  row.s = s;
  row.d = d;
  row.seed = seed;
  row.avg_error = m.avg_error;
  row.max_error = m.max_error;
  row.sketch_words = sketch_words(sk);
  if (cfg.timings) {
    row.build_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.recover_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  }
  return row;
}

std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::uint32_t> ss = cfg.s_values;
  if (ss.empty()) ss.push_back(SketchConfig::from_multiplier(cfg.k, cfg.c_s, 1).s);

  std::vector<MetricsRow> rows;
  for (std::uint32_t r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t seed = cfg.master_seed + r;
    const std::vector<double> x = sweep_dataset(cfg, seed);
    for (Algorithm a : cfg.algorithms) {
      std::vector<std::uint32_t> ds = cfg.d_values;
      if (ds.empty()) ds.push_back(cfg.d.value_or(default_depth(a)));
      for (std::uint32_t s : ss) {
        for (std::uint32_t d : ds) rows.push_back(run_cell(cfg, a, x, s, d, seed));
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const MetricsRow& l, const MetricsRow& r) {
    return std::make_tuple(l.algorithm, l.s, l.d, l.seed) <
           std::make_tuple(r.algorithm, r.s, r.d, r.seed);
  });
  return rows;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() {
  return "algorithm,n,k,s,d,seed,avg_error,max_error,sketch_words,build_ms,recover_ms";
}

std::string csv_row(const MetricsRow& r) {
  std::string out = algorithm_name(r.algorithm);
  out += ',' + std::to_string(r.n) + ',' + std::to_string(r.k) + ',' + std::to_string(r.s) +
         ',' + std::to_string(r.d) + ',' + std::to_string(r.seed) + ',' +
         format_real(r.avg_error) + ',' + format_real(r.max_error) + ',' +
         std::to_string(r.sketch_words) + ',' + format_real(r.build_ms) + ',' +
         format_real(r.recover_ms);
  return out;
}

void write_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << csv_header() << '\n';
  for (const MetricsRow& r : rows) out << csv_row(r) << '\n';
}

}  // namespace biask
