// Command-line front end over the C interface.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biask/biask.h"

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(biask_status st) {
  switch (st) {
    case BIASK_OK: return 0;
    case BIASK_ERR_FORMAT: return 3;
    case BIASK_ERR_IO:
    case BIASK_ERR_INTERNAL: return 1;
    default: return 2;
  }
}

void check(biask_status st) {
  if (st != BIASK_OK) {
    throw CliError{exit_code_for(st), biask_last_error()};
  }
}

[[noreturn]] void config_error(const std::string& msg) { throw CliError{2, msg}; }

struct SketchDeleter {
  void operator()(biask_sketch* s) const { biask_sketch_free(s); }
};
struct StreamDeleter {
  void operator()(biask_stream* s) const { biask_stream_free(s); }
};
using SketchPtr = std::unique_ptr<biask_sketch, SketchDeleter>;
using StreamPtr = std::unique_ptr<biask_stream, StreamDeleter>;

SketchPtr load(const std::string& path) {
  biask_sketch* sk = nullptr;
  check(biask_sketch_load(path.c_str(), &sk));
  return SketchPtr(sk);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes to a file, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::trunc);
      if (!file_) throw CliError{1, "cannot open " + path + " for writing"};
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct SketchOpts {
  std::uint32_t k = 100;
  double cs = 4.0;
  std::uint32_t s = 0;
  std::uint32_t d = 0;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--k", k, "Sparsity target")->capture_default_str();
    app->add_option("--cs", cs, "Bucket multiplier, s = ceil(cs * k)")->capture_default_str();
    app->add_option("--s", s, "Explicit bucket count (overrides --cs)");
    app->add_option("--d", d, "Rows (default 9 for l1sr/l2sr, 10 otherwise)");
    app->add_option("--seed", seed, "Master seed for all hash functions")->capture_default_str();
  }
  biask_config config() const {
    biask_config c;
    biask_config_default(&c);
    c.k = k;
    c.c_s = cs;
    c.s = s;
    c.d = d;
    c.master_seed = seed;
    return c;
  }
};

struct DataOpts {
  std::string vector;
  std::uint64_t n = 100000;
  double b = 100.0;
  double sigma = 15.0;
  std::uint64_t m_shift = 0;
  double shift = 0.0;
  std::uint64_t data_seed = 1;

  void add(CLI::App* app) {
    app->add_option("--vector", vector, "Whitespace-separated reals (replaces generation)");
    app->add_option("--n", n, "Dimension of generated data")->capture_default_str();
    app->add_option("--b", b, "Bias of generated data")->capture_default_str();
    app->add_option("--sigma", sigma, "Standard deviation")->capture_default_str();
    app->add_option("--m-shift", m_shift, "Number of shifted entries")->capture_default_str();
    app->add_option("--shift", shift, "Amount added to shifted entries")->capture_default_str();
    app->add_option("--data-seed", data_seed, "Generator seed")->capture_default_str();
  }
  std::vector<double> load() const {
    if (!vector.empty()) {
      double* buf = nullptr;
      std::uint64_t len = 0;
      check(biask_read_vector(vector.c_str(), &buf, &len));
      std::vector<double> x(buf, buf + len);
      biask_vector_free(buf);
      return x;
    }
    std::vector<double> x(n);
    check(biask_gen_gaussian(n, b, sigma, m_shift, shift, data_seed, x.data()));
    return x;
  }
};

biask_estimator parse_estimator(const std::string& name) {
  static const std::map<std::string, biask_estimator> names{
      {"default", BIASK_EST_DEFAULT},
      {"median", BIASK_EST_COUNT_MEDIAN},
      {"sketch", BIASK_EST_COUNT_SKETCH},
      {"min", BIASK_EST_COUNT_MIN}};
  const auto it = names.find(name);
  if (it == names.end()) config_error("unknown estimator '" + name + "'");
  return it->second;
}

biask_algorithm parse_algo(const std::string& name) {
  biask_algorithm a{};
  check(biask_parse_algorithm(name.c_str(), &a));
  return a;
}

const char* kind_name(biask_kind k) {
  switch (k) {
    case BIASK_KIND_CM: return "cm";
    case BIASK_KIND_CS: return "cs";
    case BIASK_KIND_L1: return "l1";
    case BIASK_KIND_L2: return "l2";
    case BIASK_KIND_DYADIC: return "dyadic";
  }
  return "?";
}

void print_info(std::ostream& out, const biask_sketch* sk) {
  biask_sketch_info info{};
  check(biask_sketch_info_get(sk, &info));
  out << "kind=" << kind_name(info.kind) << " n=" << info.n << " k=" << info.k
      << " s=" << info.s << " d=" << info.d << " seed=" << info.master_seed
      << " words=" << info.words << (info.has_total ? " total=yes" : "") << '\n';
}

void print_comm(std::ostream& out, const biask_comm& comm, std::uint32_t kappa) {
  out << "# rounds=" << comm.rounds << '\n';
  out << "# site,up_words,down_words\n";
  for (std::uint32_t j = 0; j < kappa; ++j) {
    out << "# " << j << ',' << comm.up[j] << ',' << comm.down[j] << '\n';
  }
}

std::vector<std::uint64_t> even_boundaries(std::uint64_t N, std::uint32_t kappa) {
  if (kappa == 0 || kappa > N) config_error("--sites must be in [1, cols]");
  std::vector<std::uint64_t> b(kappa + 1);
  for (std::uint32_t j = 0; j <= kappa; ++j) b[j] = N * j / kappa;
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias-aware linear sketches: build, recover, merge, stream and experiment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", biask_version());

  // gen
  DataOpts gen_data;
  std::string gen_out = "-";
  auto* gen = app.add_subcommand("gen", "Generate a Gaussian vector");
  gen_data.add(gen);
  gen->add_option("--out", gen_out, "Output file ('-' for stdout)");

  // sketch
  DataOpts sk_data;
  SketchOpts sk_opts;
  std::string sk_algo, sk_out;
  auto* sketch = app.add_subcommand("sketch", "Sketch a vector and save it");
  sketch->add_option("--algo", sk_algo, "l1sr, l2sr, cm, cs, cmin, l1mean, l2mean or dyadic")
      ->required();
  sk_data.add(sketch);
  sk_opts.add(sketch);
  sketch->add_option("--out", sk_out, "Sketch file")->required();

  // recover
  std::string rec_in, rec_est = "default", rec_out = "-";
  auto* recover = app.add_subcommand("recover", "Recover the full vector from a sketch file");
  recover->add_option("--in", rec_in, "Sketch file")->required();
  recover->add_option("--estimator", rec_est, "default, median, sketch or min");
  recover->add_option("--out", rec_out, "Output file ('-' for stdout)");

  // query
  std::string q_in, q_est = "default";
  std::vector<std::uint64_t> q_index;
  auto* query = app.add_subcommand("query", "Point queries against a sketch file");
  query->add_option("--in", q_in, "Sketch file")->required();
  query->add_option("--index", q_index, "Coordinates to query")->required();
  query->add_option("--estimator", q_est, "default, median, sketch or min");

  // merge
  std::vector<std::string> m_in;
  std::string m_out;
  auto* merge = app.add_subcommand("merge", "Sum sketches built with the same seed");
  merge->add_option("--in", m_in, "Sketch files")->required()->expected(2, -1);
  merge->add_option("--out", m_out, "Merged sketch file")->required();

  // stream
  int st_p = 2;
  std::uint64_t st_n = 10000, st_count = 100000, st_stream_seed = 1;
  std::string st_updates;
  std::vector<std::uint64_t> st_query;
  bool st_check = false;
  SketchOpts st_opts;
  auto* stream = app.add_subcommand("stream", "Process an update stream with live point queries");
  stream->add_option("--p", st_p, "1 or 2")->capture_default_str();
  stream->add_option("--n", st_n, "Dimension")->capture_default_str();
  st_opts.add(stream);
  stream->add_option("--updates", st_updates, "File of 'index delta' lines");
  stream->add_option("--count", st_count, "Random updates when no file is given")
      ->capture_default_str();
  stream->add_option("--stream-seed", st_stream_seed, "Seed of the random updates")
      ->capture_default_str();
  stream->add_option("--query", st_query, "Coordinates to report at the end");
  stream->add_flag("--check", st_check, "Compare every query against a batch recovery");

  // outliers
  DataOpts o_data;
  SketchOpts o_opts;
  std::uint32_t o_sites = 3;
  int o_p = 2;
  std::uint64_t o_share_seed = 1;
  std::string o_out = "-";
  auto* outliers = app.add_subcommand("outliers", "Distributed outlier detection");
  o_data.add(outliers);
  o_opts.add(outliers);
  outliers->add_option("--sites", o_sites, "Number of sites")->capture_default_str();
  outliers->add_option("--p", o_p, "1 or 2")->capture_default_str();
  outliers->add_option("--share-seed", o_share_seed, "Seed of the additive split")
      ->capture_default_str();
  outliers->add_option("--out", o_out, "Output file ('-' for stdout)");

  // simjoin
  std::string j_matrix, j_out = "-";
  std::uint64_t j_rows = 20, j_cols = 50, j_data_seed = 1;
  std::uint32_t j_sites = 3;
  double j_theta = 0.0;
  int j_p = 2;
  SketchOpts j_opts;
  auto* simjoin = app.add_subcommand("simjoin", "Distributed inner-product similarity join");
  simjoin->add_option("--matrix", j_matrix, "rows x cols reals, row-major");
  simjoin->add_option("--rows", j_rows, "Rows n of A")->capture_default_str();
  simjoin->add_option("--cols", j_cols, "Columns N of A (the joined vectors)")
      ->capture_default_str();
  simjoin->add_option("--data-seed", j_data_seed, "Seed for a random A")->capture_default_str();
  simjoin->add_option("--sites", j_sites, "Number of sites")->capture_default_str();
  simjoin->add_option("--theta", j_theta, "Similarity threshold")->required();
  simjoin->add_option("--p", j_p, "1 or 2")->capture_default_str();
  j_opts.add(simjoin);
  simjoin->add_option("--out", j_out, "Output file ('-' for stdout)");

  // heavy
  std::string h_in, h_out = "-";
  double h_theta = 0.0;
  DataOpts h_data;
  SketchOpts h_opts;
  auto* heavy = app.add_subcommand("heavy", "Dyadic threshold query");
  heavy->add_option("--in", h_in, "Dyadic sketch file (otherwise built from the data options)");
  heavy->add_option("--theta", h_theta, "Threshold")->required();
  h_data.add(heavy);
  h_opts.add(heavy);
  heavy->add_option("--out", h_out, "Output file ('-' for stdout)");

  // sweep
  std::vector<std::string> sw_algo{"l2sr"};
  std::vector<std::uint32_t> sw_s, sw_d;
  std::uint64_t sw_n = 100000, sw_seed = 1, sw_m_shift = 0;
  std::uint32_t sw_k = 100, sw_repeats = 1;
  double sw_cs = 4.0, sw_b = 100.0, sw_sigma = 15.0, sw_shift = 0.0;
  bool sw_timings = false;
  std::string sw_out = "-";
  auto* sweep = app.add_subcommand("sweep", "Error sweep over s, d and seeds; CSV output");
  sweep->add_option("--algo", sw_algo, "Algorithms")->capture_default_str();
  sweep->add_option("--n", sw_n, "Dimension")->capture_default_str();
  sweep->add_option("--k", sw_k, "Sparsity target")->capture_default_str();
  sweep->add_option("--cs", sw_cs, "Bucket multiplier when --s is absent")->capture_default_str();
  sweep->add_option("--s", sw_s, "Bucket counts");
  sweep->add_option("--d", sw_d, "Depths");
  sweep->add_option("--seed", sw_seed, "First seed")->capture_default_str();
  sweep->add_option("--repeats", sw_repeats, "Seeds per cell")->capture_default_str();
  sweep->add_option("--b", sw_b, "Bias")->capture_default_str();
  sweep->add_option("--sigma", sw_sigma, "Standard deviation")->capture_default_str();
  sweep->add_option("--m-shift", sw_m_shift, "Shifted entries")->capture_default_str();
  sweep->add_option("--shift", sw_shift, "Shift amount")->capture_default_str();
  sweep->add_flag("--timings", sw_timings, "Fill the build_ms and recover_ms columns");
  sweep->add_option("--out", sw_out, "CSV file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      const auto x = gen_data.load();
      Output out(gen_out);
      for (double v : x) out.get() << fmt(v) << '\n';
    } else if (*sketch) {
      const auto x = sk_data.load();
      const auto cfg = sk_opts.config();
      biask_sketch* raw = nullptr;
      check(biask_sketch_build(parse_algo(sk_algo), x.data(), x.size(), &cfg, &raw));
      SketchPtr sk(raw);
      check(biask_sketch_save(sk.get(), sk_out.c_str()));
      print_info(std::cout, sk.get());
    } else if (*recover) {
      auto sk = load(rec_in);
      biask_sketch_info info{};
      check(biask_sketch_info_get(sk.get(), &info));
      std::vector<double> x(info.n);
      check(biask_sketch_recover(sk.get(), parse_estimator(rec_est), x.data(), x.size()));
      Output out(rec_out);
      for (double v : x) out.get() << fmt(v) << '\n';
    } else if (*query) {
      auto sk = load(q_in);
      const auto est = parse_estimator(q_est);
      std::cout << "index,estimate\n";
      for (std::uint64_t j : q_index) {
        double v = 0.0;
        check(biask_sketch_point(sk.get(), est, j, &v));
        std::cout << j << ',' << fmt(v) << '\n';
      }
    } else if (*merge) {
      auto acc = load(m_in.front());
      for (std::size_t i = 1; i < m_in.size(); ++i) {
        auto next = load(m_in[i]);
        check(biask_sketch_merge(acc.get(), next.get()));
      }
      check(biask_sketch_save(acc.get(), m_out.c_str()));
      print_info(std::cout, acc.get());
    } else if (*stream) {
      const auto cfg = st_opts.config();
      biask_stream* raw = nullptr;
      check(biask_stream_new(st_p, st_n, &cfg, &raw));
      StreamPtr st(raw);
      SketchPtr batch;
      if (st_check) {
        biask_sketch* b = nullptr;
        check(biask_sketch_new(st_p == 1 ? BIASK_ALGO_L1SR : BIASK_ALGO_L2SR, st_n, &cfg, &b));
        batch.reset(b);
      }
      std::uint64_t applied = 0;
      auto apply = [&](std::uint64_t i, double delta) {
        check(biask_stream_update(st.get(), i, delta));
        if (batch) check(biask_sketch_update(batch.get(), i, delta));
        ++applied;
      };
      if (!st_updates.empty()) {
        std::ifstream in(st_updates);
        if (!in) throw CliError{1, "cannot open " + st_updates};
        std::string line;
        std::uint64_t lineno = 0;
        while (std::getline(in, line)) {
          ++lineno;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          std::istringstream ls(line);
          std::uint64_t i = 0;
          double delta = 0.0;
          std::string rest;
          if (!(ls >> i >> delta) || (ls >> rest)) {
            throw CliError{3, "format error: bad update on line " + std::to_string(lineno)};
          }
          apply(i, delta);
        }
      } else {
        std::mt19937_64 rng(st_stream_seed);
        std::uniform_int_distribution<std::uint64_t> pick(0, st_n - 1);
        std::uniform_int_distribution<int> step(-5, 20);
        for (std::uint64_t t = 0; t < st_count; ++t) apply(pick(rng), step(rng));
      }
      double bias = 0.0;
      check(biask_stream_bias(st.get(), &bias));
      std::cout << "# updates=" << applied << " bias=" << fmt(bias) << '\n';
      std::cout << "index,estimate" << (batch ? ",batch,equal" : "") << '\n';
      bool all_equal = true;
      for (std::uint64_t j : st_query) {
        double v = 0.0;
        check(biask_stream_point(st.get(), j, &v));
        std::cout << j << ',' << fmt(v);
        if (batch) {
          double w = 0.0;
          check(biask_sketch_point(batch.get(), BIASK_EST_DEFAULT, j, &w));
          const bool eq = v == w;
          all_equal = all_equal && eq;
          std::cout << ',' << fmt(w) << ',' << (eq ? "yes" : "no");
        }
        std::cout << '\n';
      }
      if (!all_equal) return 1;
    } else if (*outliers) {
      const auto x = o_data.load();
      if (o_sites == 0) config_error("--sites must be positive");
      std::vector<double> shares(x.size() * o_sites);
      check(biask_additive_shares(x.data(), x.size(), o_sites, o_share_seed, shares.data()));
      std::vector<const double*> ptrs;
      for (std::uint32_t j = 0; j < o_sites; ++j) ptrs.push_back(shares.data() + j * x.size());
      const auto cfg = o_opts.config();
      std::vector<std::uint64_t> idx(cfg.k), up(o_sites), down(o_sites);
      biask_comm comm{0, up.data(), down.data()};
      double median = 0.0;
      check(biask_outliers(ptrs.data(), o_sites, x.size(), cfg.k, o_p, &cfg, idx.data(), &median,
                           &comm));
      Output out(o_out);
      out.get() << "# median=" << fmt(median) << '\n';
      out.get() << "rank,index\n";
      for (std::size_t r = 0; r < idx.size(); ++r) out.get() << r + 1 << ',' << idx[r] << '\n';
      print_comm(out.get(), comm, o_sites);
    } else if (*simjoin) {
      std::vector<double> a;
      if (!j_matrix.empty()) {
        double* buf = nullptr;
        std::uint64_t len = 0;
        check(biask_read_vector(j_matrix.c_str(), &buf, &len));
        a.assign(buf, buf + len);
        biask_vector_free(buf);
        if (a.size() != j_rows * j_cols) config_error("matrix does not have rows x cols entries");
      } else {
        a.resize(j_rows * j_cols);
        check(biask_gen_gaussian(a.size(), 0.0, 1.0, 0, 0.0, j_data_seed, a.data()));
      }
      const auto bounds = even_boundaries(j_cols, j_sites);
      const auto cfg = j_opts.config();
      std::vector<std::uint64_t> per_site(j_sites), up(j_sites), down(j_sites);
      biask_comm comm{0, up.data(), down.data()};
      Output out(j_out);
      if (j_theta <= 0.0) std::cerr << "warning: theta <= 0 joins every pair\n";
      out.get() << "u,v,estimate\n";
      auto emit = [](std::uint64_t u, std::uint64_t v, double est, void* user) -> int {
        *static_cast<std::ostream*>(user) << u << ',' << v << ',' << fmt(est) << '\n';
        return 0;
      };
      check(biask_simjoin(a.data(), j_rows, j_cols, bounds.data(), j_sites, j_theta, j_p, &cfg,
                          emit, &out.get(), per_site.data(), &comm));
      for (std::uint32_t j = 0; j < j_sites; ++j) {
        out.get() << "# site " << j << " pairs=" << per_site[j] << '\n';
      }
      print_comm(out.get(), comm, j_sites);
    } else if (*heavy) {
      SketchPtr sk;
      if (!h_in.empty()) {
        sk = load(h_in);
      } else {
        const auto x = h_data.load();
        const auto cfg = h_opts.config();
        biask_sketch* raw = nullptr;
        check(biask_sketch_build(BIASK_ALGO_DYADIC, x.data(), x.size(), &cfg, &raw));
        sk.reset(raw);
      }
      Output out(h_out);
      out.get() << "index,estimate\n";
      auto emit = [](std::uint64_t i, double est, void* user) -> int {
        *static_cast<std::ostream*>(user) << i << ',' << fmt(est) << '\n';
        return 0;
      };
      std::uint64_t visited = 0;
      check(biask_sketch_heavy(sk.get(), h_theta, emit, &out.get(), &visited));
      std::cerr << "# visited=" << visited << '\n';
    } else if (*sweep) {
      std::vector<biask_algorithm> algos;
      for (const auto& name : sw_algo) algos.push_back(parse_algo(name));
      biask_sweep_config sc{};
      sc.algorithms = algos.data();
      sc.n_algorithms = static_cast<std::uint32_t>(algos.size());
      sc.n = sw_n;
      sc.k = sw_k;
      sc.c_s = sw_cs;
      sc.d = 0;
      sc.master_seed = sw_seed;
      sc.repeats = sw_repeats;
      sc.b = sw_b;
      sc.sigma = sw_sigma;
      sc.m_shift = sw_m_shift;
      sc.shift = sw_shift;
      sc.s_values = sw_s.empty() ? nullptr : sw_s.data();
      sc.n_s_values = static_cast<std::uint32_t>(sw_s.size());
      sc.d_values = sw_d.empty() ? nullptr : sw_d.data();
      sc.n_d_values = static_cast<std::uint32_t>(sw_d.size());
      sc.timings = sw_timings ? 1 : 0;
      check(biask_sweep(&sc, sw_out.c_str(), nullptr));
    }
  } catch (const CliError& e) {
    std::cerr << e.message << '\n';
    return e.exit_code;
  }
  return 0;
}
