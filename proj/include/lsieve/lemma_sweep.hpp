#pragma once

// Sweeps of the empirical Lemma maximum over every non-principal character of
// a modulus, used to build and to check stored thresholds.

#include <cstdint>
#include <vector>

#include "lsieve/number_core.hpp"

namespace lsieve {

struct LemmaSweepPoint {
  std::int64_t D = 0;
  std::int64_t x = 0;
  std::size_t characters_scanned = 0;
  double max_value = 0.0;
  std::size_t character_index = 0;  // into character_group(D)
  std::int64_t w_star = 0;
  std::int64_t y_star = 0;
  double t_star = 0.0;
};

/// 1000, 2000, 4000, ... below max_x, then max_x itself.
std::vector<std::int64_t> sweep_x_values(std::int64_t max_x);

/// Largest lemma_sup_scan value over the non-principal characters mod D with
/// dyadic w from D, every prime y and the default t grid split `subdivide`
/// times. Only one character of each conjugate pair is scanned, since the
/// pair shares its maximum. D with no non-principal character gives 0.
LemmaSweepPoint lemma_sweep_max(const PrimeTable& table, std::int64_t D, std::int64_t x, double B,
                                std::size_t subdivide = 1);

}  // namespace lsieve
