#include "lsieve/prefix_scan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "lsieve/parallel.hpp"

namespace lsieve {

namespace {

constexpr std::size_t kLanes = 16;
// Phases are resynchronized with a direct exp at the start of every chunk, so
// chunk boundaries (not worker scheduling) decide rounding.
constexpr std::size_t kBlocksPerChunk = 8;
constexpr std::size_t kChunk = kLanes * kBlocksPerChunk;
constexpr std::size_t kTile = 256;

struct LaneState {
  alignas(64) std::array<double, kLanes> sum_re{};
  alignas(64) std::array<double, kLanes> sum_im{};
  alignas(64) std::array<double, kLanes> comp_re{};
  alignas(64) std::array<double, kLanes> comp_im{};
  alignas(64) std::array<double, kLanes> max_v{};
  alignas(64) std::array<double, kLanes> min_v{};
  alignas(64) std::array<std::int64_t, kLanes> max_pos{};
  alignas(64) std::array<std::int64_t, kLanes> min_pos{};

  void reset_segment() {
    max_v.fill(-std::numeric_limits<double>::infinity());
    min_v.fill(std::numeric_limits<double>::infinity());
    max_pos.fill(0);
    min_pos.fill(0);
  }
};

struct PhaseTables {
  std::vector<double> step_re;  // exp(-i l h log p_m), [m * kLanes + l]
  std::vector<double> step_im;
  std::vector<std::complex<double>> block_step;  // exp(-i kLanes h log p_m)
};

PhaseTables make_phase_tables(std::span<const double> log_p, double step) {
  PhaseTables tables;
  const std::size_t n = log_p.size();
  tables.step_re.resize(n * kLanes);
  tables.step_im.resize(n * kLanes);
  tables.block_step.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double angle = -static_cast<double>(l) * step * log_p[m];
      tables.step_re[m * kLanes + l] = std::cos(angle);
      tables.step_im[m * kLanes + l] = std::sin(angle);
    }
    const double angle = -static_cast<double>(kLanes) * step * log_p[m];
    tables.block_step[m] = {std::cos(angle), std::sin(angle)};
  }
  return tables;
}

#if defined(__AVX512F__)
using Vec = double __attribute__((vector_size(64)));
constexpr std::size_t kWidth = 8;
#elif defined(__AVX__)
using Vec = double __attribute__((vector_size(32)));
constexpr std::size_t kWidth = 4;
#else
using Vec = double __attribute__((vector_size(16)));
constexpr std::size_t kWidth = 2;
#endif
constexpr std::size_t kVecs = kLanes / kWidth;

inline Vec load(const double* p) {
  Vec v;
  __builtin_memcpy(&v, p, sizeof(Vec));
  return v;
}
inline void store(double* p, Vec v) { __builtin_memcpy(p, &v, sizeof(Vec)); }

void scan_complex_segment(LaneState& state, const double* __restrict cz_re, const double* __restrict cz_im, std::size_t cz_base,
                          const double* __restrict step_re, const double* __restrict step_im, std::size_t begin,
                          std::size_t end) {
  Vec sr[kVecs], si[kVecs], kr[kVecs], ki[kVecs], best[kVecs], at[kVecs]{};
  for (std::size_t v = 0; v < kVecs; ++v) {
    sr[v] = load(state.sum_re.data() + v * kWidth);
    si[v] = load(state.sum_im.data() + v * kWidth);
    kr[v] = load(state.comp_re.data() + v * kWidth);
    ki[v] = load(state.comp_im.data() + v * kWidth);
    best[v] = load(state.max_v.data() + v * kWidth);
    for (std::size_t l = 0; l < kWidth; ++l) at[v][l] = static_cast<double>(state.max_pos[v * kWidth + l]);
  }
  for (std::size_t m = begin; m < end; ++m) {
    const double cr = cz_re[m - cz_base];
    const double ci = cz_im[m - cz_base];
    const double pos = static_cast<double>(m + 1);
    for (std::size_t v = 0; v < kVecs; ++v) {
      const Vec rr = load(step_re + m * kLanes + v * kWidth);
      const Vec ri = load(step_im + m * kLanes + v * kWidth);
      const Vec tr = cr * rr - ci * ri;
      const Vec ti = cr * ri + ci * rr;
      const Vec yr = tr - kr[v];
      const Vec nr = sr[v] + yr;
      kr[v] = (nr - sr[v]) - yr;
      sr[v] = nr;
      const Vec yi = ti - ki[v];
      const Vec ni = si[v] + yi;
      ki[v] = (ni - si[v]) - yi;
      si[v] = ni;
      const Vec a2 = nr * nr + ni * ni;
      const auto up = a2 > best[v];
      best[v] = up ? a2 : best[v];
      at[v] = up ? pos : at[v];
    }
  }
  for (std::size_t v = 0; v < kVecs; ++v) {
    store(state.sum_re.data() + v * kWidth, sr[v]);
    store(state.sum_im.data() + v * kWidth, si[v]);
    store(state.comp_re.data() + v * kWidth, kr[v]);
    store(state.comp_im.data() + v * kWidth, ki[v]);
    store(state.max_v.data() + v * kWidth, best[v]);
    for (std::size_t l = 0; l < kWidth; ++l) state.max_pos[v * kWidth + l] = static_cast<std::int64_t>(at[v][l]);
  }
}

void scan_real_segment(LaneState& state, const double* __restrict cz_re, const double* __restrict cz_im, std::size_t cz_base,
                       const double* __restrict step_re, const double* __restrict step_im, std::size_t begin,
                       std::size_t end) {
  Vec sr[kVecs], kr[kVecs], hi[kVecs], lo[kVecs], hi_at[kVecs]{}, lo_at[kVecs]{};
  for (std::size_t v = 0; v < kVecs; ++v) {
    sr[v] = load(state.sum_re.data() + v * kWidth);
    kr[v] = load(state.comp_re.data() + v * kWidth);
    hi[v] = load(state.max_v.data() + v * kWidth);
    lo[v] = load(state.min_v.data() + v * kWidth);
    for (std::size_t l = 0; l < kWidth; ++l) {
      hi_at[v][l] = static_cast<double>(state.max_pos[v * kWidth + l]);
      lo_at[v][l] = static_cast<double>(state.min_pos[v * kWidth + l]);
    }
  }
  for (std::size_t m = begin; m < end; ++m) {
    const double cr = cz_re[m - cz_base];
    const double ci = cz_im[m - cz_base];
    const double pos = static_cast<double>(m + 1);
    for (std::size_t v = 0; v < kVecs; ++v) {
      const Vec rr = load(step_re + m * kLanes + v * kWidth);
      const Vec ri = load(step_im + m * kLanes + v * kWidth);
      const Vec tr = cr * rr - ci * ri;
      const Vec yr = tr - kr[v];
      const Vec nr = sr[v] + yr;
      kr[v] = (nr - sr[v]) - yr;
      sr[v] = nr;
      const auto up = nr > hi[v];
      hi[v] = up ? nr : hi[v];
      hi_at[v] = up ? pos : hi_at[v];
      const auto down = nr < lo[v];
      lo[v] = down ? nr : lo[v];
      lo_at[v] = down ? pos : lo_at[v];
    }
  }
  for (std::size_t v = 0; v < kVecs; ++v) {
    store(state.sum_re.data() + v * kWidth, sr[v]);
    store(state.comp_re.data() + v * kWidth, kr[v]);
    store(state.max_v.data() + v * kWidth, hi[v]);
    store(state.min_v.data() + v * kWidth, lo[v]);
    for (std::size_t l = 0; l < kWidth; ++l) {
      state.max_pos[v * kWidth + l] = static_cast<std::int64_t>(hi_at[v][l]);
      state.min_pos[v * kWidth + l] = static_cast<std::int64_t>(lo_at[v][l]);
    }
  }
}

}  // namespace

TGrid TGrid::covering(double half_width, double max_step) {
  if (!(half_width >= 0.0) || !(max_step > 0.0)) throw std::domain_error("TGrid: invalid width or step");
  if (half_width == 0.0) return {0.0, 0};
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * half_width / max_step));
  return {half_width, std::max<std::size_t>(n, 1)};
}

std::vector<std::size_t> normalized_checkpoints(std::vector<std::size_t> checkpoints, std::size_t n) {
  for (auto c : checkpoints) {
    if (c > n) throw std::out_of_range("prefix scan: checkpoint beyond the number of terms");
  }
  checkpoints.push_back(n);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  return checkpoints;
}

std::vector<std::vector<SegmentStats>> scan_t_grid(const PrefixScanInput& input, TermMode mode,
                                                   const TGrid& grid) {
  const std::size_t n = input.coeff.size();
  if (input.log_p.size() != n) throw std::invalid_argument("prefix scan: coefficient/log length mismatch");
  const auto checkpoints = normalized_checkpoints(input.checkpoints, n);
  const std::size_t count = grid.count();
  const double step = grid.step();
  const PhaseTables tables = make_phase_tables(input.log_p, step);

  std::vector<std::vector<SegmentStats>> result(count, std::vector<SegmentStats>(checkpoints.size()));
  const std::size_t chunks = (count + kChunk - 1) / kChunk;

  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t first_index = chunk * kChunk;
    const std::size_t blocks = std::min(kBlocksPerChunk, (count - first_index + kLanes - 1) / kLanes);
    const double t0 = grid.at(first_index);
    std::vector<LaneState> states(blocks);
    std::vector<double> cz_re(blocks * kTile);
    std::vector<double> cz_im(blocks * kTile);

    std::size_t seg = 0;
    auto close_segment = [&] {
      for (std::size_t b = 0; b < blocks; ++b) {
        LaneState& state = states[b];
        const std::size_t block_first = first_index + b * kLanes;
        for (std::size_t l = 0; l < kLanes && block_first + l < count; ++l) {
          SegmentStats& out = result[block_first + l][seg];
          out.end_value = {state.sum_re[l] - state.comp_re[l],
                           mode == TermMode::kComplex ? state.sum_im[l] - state.comp_im[l] : 0.0};
          out.max_value = state.max_v[l];
          out.max_pos = static_cast<std::size_t>(state.max_pos[l]);
          out.min_value = state.min_v[l];
          out.min_pos = static_cast<std::size_t>(state.min_pos[l]);
        }
        state.reset_segment();
      }
      ++seg;
    };
    for (auto& state : states) state.reset_segment();
    while (seg < checkpoints.size() && checkpoints[seg] == 0) close_segment();

    // Tiles of primes keep the per-prime phase steps in cache across all
    // blocks of the chunk.
    for (std::size_t tile = 0; tile < n; tile += kTile) {
      const std::size_t tile_end = std::min(n, tile + kTile);
      for (std::size_t m = tile; m < tile_end; ++m) {
        const double angle = -t0 * input.log_p[m];
        double zr = std::cos(angle);
        double zi = std::sin(angle);
        const double ar = input.coeff[m].real();
        const double ai = input.coeff[m].imag();
        const double br = tables.block_step[m].real();
        const double bi = tables.block_step[m].imag();
        for (std::size_t b = 0; b < blocks; ++b) {
          cz_re[b * kTile + (m - tile)] = ar * zr - ai * zi;
          cz_im[b * kTile + (m - tile)] = ar * zi + ai * zr;
          const double next_r = zr * br - zi * bi;
          zi = zr * bi + zi * br;
          zr = next_r;
        }
      }
      std::size_t pos = tile;
      while (pos < tile_end) {
        const std::size_t piece_end = std::min(tile_end, checkpoints[seg]);
        for (std::size_t b = 0; b < blocks; ++b) {
          if (mode == TermMode::kComplex) {
            scan_complex_segment(states[b], cz_re.data() + b * kTile, cz_im.data() + b * kTile, tile,
                                 tables.step_re.data(), tables.step_im.data(), pos, piece_end);
          } else {
            scan_real_segment(states[b], cz_re.data() + b * kTile, cz_im.data() + b * kTile, tile,
                              tables.step_re.data(), tables.step_im.data(), pos, piece_end);
          }
        }
        pos = piece_end;
        while (seg < checkpoints.size() && checkpoints[seg] == pos) close_segment();
      }
    }
  });
  return result;
}

std::vector<SegmentStats> scan_at(const PrefixScanInput& input, TermMode mode, double t) {
  const std::size_t n = input.coeff.size();
  if (input.log_p.size() != n) throw std::invalid_argument("prefix scan: coefficient/log length mismatch");
  const auto checkpoints = normalized_checkpoints(input.checkpoints, n);
  std::vector<SegmentStats> out(checkpoints.size());
  double sum_re = 0.0, sum_im = 0.0, comp_re = 0.0, comp_im = 0.0;
  std::size_t m = 0;
  for (std::size_t seg = 0; seg < checkpoints.size(); ++seg) {
    SegmentStats& stats = out[seg];
    for (; m < checkpoints[seg]; ++m) {
      const double angle = -t * input.log_p[m];
      const std::complex<double> term = input.coeff[m] * std::complex<double>(std::cos(angle), std::sin(angle));
      const double yr = term.real() - comp_re;
      const double nr = sum_re + yr;
      comp_re = (nr - sum_re) - yr;
      sum_re = nr;
      if (mode == TermMode::kComplex) {
        const double yi = term.imag() - comp_im;
        const double ni = sum_im + yi;
        comp_im = (ni - sum_im) - yi;
        sum_im = ni;
        const double a2 = nr * nr + ni * ni;
        if (a2 > stats.max_value) {
          stats.max_value = a2;
          stats.max_pos = m + 1;
        }
      } else {
        if (nr > stats.max_value) {
          stats.max_value = nr;
          stats.max_pos = m + 1;
        }
        if (nr < stats.min_value) {
          stats.min_value = nr;
          stats.min_pos = m + 1;
        }
      }
    }
    stats.end_value = {sum_re - comp_re, sum_im - comp_im};
  }
  return out;
}

}  // namespace lsieve
