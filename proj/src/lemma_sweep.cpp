#include "lsieve/lemma_sweep.hpp"

#include <algorithm>

#include "lsieve/characters.hpp"
#include "lsieve/euler_sums.hpp"

namespace lsieve {

std::vector<std::int64_t> sweep_x_values(std::int64_t max_x) {
  std::vector<std::int64_t> out;
  for (std::int64_t x = 1000; x < max_x; x *= 2) out.push_back(x);
  out.push_back(max_x);
  return out;
}

LemmaSweepPoint lemma_sweep_max(const PrimeTable& table, std::int64_t D, std::int64_t x, double B,
                                std::size_t subdivide) {
  const SumSpec spec{D, x, B, {}};
  spec.validate();
  LemmaSweepPoint point;
  point.D = D;
  point.x = x;
  const auto group = character_group(D);
  const auto w_grid = dyadic_grid(D, x);
  LemmaScanOptions options;
  options.grid = default_t_grid(spec).subdivided(std::max<std::size_t>(subdivide, 1));
  bool first = true;
  for (std::size_t i = 1; i < group.size(); ++i) {
    const Character partner = conjugate(group[i]);
    const auto j = static_cast<std::size_t>(std::find(group.begin(), group.end(), partner) - group.begin());
    if (j < i) continue;
    const auto report = lemma_sup_scan(table, group[i], spec, w_grid, {}, options);
    ++point.characters_scanned;
    if (first || report.max_value > point.max_value) {
      first = false;
      point.max_value = report.max_value;
      point.character_index = i;
      point.w_star = report.w_star;
      point.y_star = report.y_star;
      point.t_star = report.t_star;
    }
  }
  return point;
}

}  // namespace lsieve
