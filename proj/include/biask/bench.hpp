#pragma once

// Synthetic datasets, error metrics and parameter sweeps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biask/any_sketch.hpp"

namespace biask {

/// n draws from N(b, sigma^2). Deterministic for a given seed.
std::vector<double> gen_gaussian(std::uint64_t n, double b, double sigma, std::uint64_t seed);

/// The m_shift distinct positions that gen_gaussian_shifted moves, ascending.
std::vector<std::uint64_t> shifted_positions(std::uint64_t n, std::uint64_t m_shift,
                                             std::uint64_t seed);

/// gen_gaussian plus `shift` added at shifted_positions(n, m_shift, seed).
std::vector<double> gen_gaussian_shifted(std::uint64_t n, double b, double sigma,
                                         std::uint64_t m_shift, double shift,
                                         std::uint64_t seed);

struct Metrics {
  double avg_error = 0.0;  // (1/n) |x - x_hat|_1
  double max_error = 0.0;  // |x - x_hat|_inf
};

Metrics compute_metrics(std::span<const double> x, std::span<const double> x_hat);

/// Whitespace-separated reals.
std::vector<double> read_vector(const std::string& path);
std::vector<double> parse_vector(const std::string& text);
void write_vector(std::ostream& out, std::span<const double> x);

enum class Algorithm : std::uint8_t { l1sr, l2sr, cm, cs, cmin, l1mean, l2mean };

const char* algorithm_name(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(const std::string& name);
/// 9 for the bias-aware pairs, 10 for the baselines.
std::uint32_t default_depth(Algorithm a) noexcept;
bool needs_bias_window(Algorithm a) noexcept;

/// Sketch x with the structure `a` uses.
AnySketch sketch_for(Algorithm a, std::span<const double> x, const SketchConfig& cfg,
                     std::uint64_t master_seed);
/// Recover with the estimator `a` uses.
std::vector<double> recover_for(Algorithm a, const AnySketch& sk);

/// Natural recovery for a sketch on its own: bias-aware for l1/l2, mean-bias
/// when a running total is stored, otherwise `plain` on CM/CS rows. Dyadic
/// sketches cannot recover a full vector.
std::vector<double> recover_default(const AnySketch& sk,
                                    std::optional<Estimator> plain = std::nullopt);
double point_default(const AnySketch& sk, std::uint64_t j,
                     std::optional<Estimator> plain = std::nullopt);

struct DatasetSpec {
  double b = 100.0;
  double sigma = 15.0;
  std::uint64_t m_shift = 0;
  double shift = 0.0;
};

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{Algorithm::l2sr};
  std::uint64_t n = 100000;
  std::uint32_t k = 100;
  double c_s = 4.0;
  std::optional<std::uint32_t> d;        // default_depth per algorithm when empty
  std::uint64_t master_seed = 1;
  DatasetSpec data;
  std::vector<std::uint32_t> s_values;  // ceil(c_s * k) when empty
  std::vector<std::uint32_t> d_values;  // d (or the default) when empty
  std::uint32_t repeats = 1;            // seeds master_seed, master_seed + 1, ...
  bool timings = false;                 // wall-clock columns stay 0 unless set

  void validate() const;
};

struct MetricsRow {
  Algorithm algorithm = Algorithm::l2sr;
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t s = 0;
  std::uint32_t d = 0;
  std::uint64_t seed = 0;
  double avg_error = 0.0;
  double max_error = 0.0;
  std::uint64_t sketch_words = 0;
  double build_ms = 0.0;
  double recover_ms = 0.0;
};

/// Dataset for one sweep seed; every algorithm and (s, d) cell sees the same x.
std::vector<double> sweep_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

MetricsRow run_cell(const ExperimentConfig& cfg, Algorithm a, std::span<const double> x,
                    std::uint32_t s, std::uint32_t d, std::uint64_t seed);

/// Rows sorted by (algorithm, s, d, seed).
std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg);

std::string csv_header();
std::string csv_row(const MetricsRow& row);
void write_csv(std::ostream& out, std::span<const MetricsRow> rows);

/// printf("%.17g").
std::string format_real(double v);

}  // namespace biask
