#pragma once

// Exact reference computations on dense vectors. These are the ground truth
// the sketches are measured against.

#include <cstdint>
#include <span>
#include <vector>

namespace biask {

enum class Norm : std::uint8_t { l1 = 1, l2 = 2 };

/// Err_p^k(x): the l_p norm of x after zeroing its k largest-magnitude entries.
struct TailError {
  double value = 0.0;
  Norm p = Norm::l1;
  std::uint64_t k = 0;
};

TailError tail_error(std::span<const double> x, std::uint64_t k, Norm p);

/// Err_p^k(x - beta).
double shifted_tail_error(std::span<const double> x, double beta, std::uint64_t k, Norm p);

struct BestBias {
  double beta = 0.0;
  double err = 0.0;
};

/// argmin_beta Err_1^k(x - beta). The optimal drop set is a prefix plus a
/// suffix of the sorted order, so only k + 1 splits are evaluated.
BestBias best_bias_l1(std::span<const double> x, std::uint64_t k);

/// argmin_beta Err_2^k(x - beta) via the minimum-variance window of length
/// n - k over sorted x; err = sqrt((n - k) * variance of that window).
BestBias best_bias_l2(std::span<const double> x, std::uint64_t k);

/// Original indices kept by the minimum-variance window, ascending.
std::vector<std::uint64_t> min_variance_window(std::span<const double> x, std::uint64_t k);

BestBias best_bias(std::span<const double> x, std::uint64_t k, Norm p);

}  // namespace biask
