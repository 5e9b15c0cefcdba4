#pragma once

// Prefix sums of sum_m c_m exp(-i t log p_m) for every t on an evenly spaced
// grid. This is the inner loop behind every "max over y, max over t" in the
// library, so it is written for throughput: grid points are processed in
// fixed blocks of lanes that share one pass over the primes.

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace lsieve {

/// Evenly spaced, symmetric grid of shifts t_i = T (2i - n) / n, i = 0..n.
struct TGrid {
  double half_width = 0.0;
  std::size_t intervals = 0;  // n

  /// Smallest n with 2T / n <= max_step.
  static TGrid covering(double half_width, double max_step);

  [[nodiscard]] std::size_t count() const { return intervals + 1; }
  [[nodiscard]] double step() const {
    return intervals == 0 ? 0.0 : 2.0 * half_width / static_cast<double>(intervals);
  }
  [[nodiscard]] double at(std::size_t i) const {
    if (intervals == 0) return 0.0;
    return half_width * static_cast<double>(2 * static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(intervals)) /
           static_cast<double>(intervals);
  }
  /// Same endpoints, every interval split into `factor` pieces.
  [[nodiscard]] TGrid subdivided(std::size_t factor) const { return {half_width, intervals * factor}; }
  /// All multiples of step() in [-2T, 2T]: the set of pairwise differences.
  [[nodiscard]] TGrid differences() const { return {2.0 * half_width, 2 * intervals}; }
};

enum class TermMode {
  kComplex,   // accumulate c_m z_m
  kRealPart,  // accumulate Re(c_m z_m)
};

/// Statistics of the prefix sums P_m (m = number of terms) over one segment
/// (c_{s-1}, c_s] of prefix lengths.
///
/// kComplex: max_value is max |P_m|^2, min_* unused.
/// kRealPart: max/min of the real P_m.
/// Positions are the first m attaining the extremum; an empty segment has
/// max_value = -inf, min_value = +inf, positions 0.
struct SegmentStats {
  std::complex<double> end_value;
  double max_value = -std::numeric_limits<double>::infinity();
  std::size_t max_pos = 0;
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t min_pos = 0;
};

struct PrefixScanInput {
  std::span<const std::complex<double>> coeff;  // c_m, in ascending prime order
  std::span<const double> log_p;                // log p_m, same length
  /// Ascending segment ends in [0, n]; n is appended if missing.
  std::vector<std::size_t> checkpoints;
};

/// result[i][s] = statistics of segment s at t = grid.at(i).
/// Results do not depend on worker count.
std::vector<std::vector<SegmentStats>> scan_t_grid(const PrefixScanInput& input, TermMode mode,
                                                   const TGrid& grid);

/// Same statistics at one arbitrary t, with exp evaluated directly per term.
std::vector<SegmentStats> scan_at(const PrefixScanInput& input, TermMode mode, double t);

/// Normalized checkpoint list (sorted, unique, ending at n).
std::vector<std::size_t> normalized_checkpoints(std::vector<std::size_t> checkpoints, std::size_t n);

}  // namespace lsieve
