#include "lsieve/euler_sums.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lsieve/random.hpp"

namespace lsieve {

namespace {

struct Candidate {
  double value;
  double t;
  std::int64_t y;
  double sigma;
  std::size_t tag;  // caller-defined payload (lane, w index, ...)
};

/// Largest value; among values within kTieRelTol of it, smallest (t, y, sigma).
const Candidate& pick_best(std::span<const Candidate> candidates) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) top = std::max(top, c.value);
  const double floor = top - kTieRelTol * std::max(std::abs(top), std::numeric_limits<double>::min());
  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.value < floor) continue;
    if (best == nullptr || std::tie(c.t, c.y, c.sigma) < std::tie(best->t, best->y, best->sigma)) best = &c;
  }
  return *best;
}

/// Golden-section search for a maximum of f on [lo, hi]; returns the best point evaluated.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double tolerance) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_t = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (int iter = 0; iter < 200 && (b - a) > tolerance; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc > best_f) {
        best_f = fc;
        best_t = c;
      }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd > best_f) {
        best_f = fd;
        best_t = d;
      }
    }
  }
  return {best_t, best_f};
}

/// (value, position) of the max modulus over one scan segment.
std::pair<double, std::size_t> segment_modulus(const SegmentStats& s, TermMode mode) {
  if (mode == TermMode::kComplex) return {std::sqrt(std::max(s.max_value, 0.0)), s.max_pos};
  if (s.max_pos == 0 && s.min_pos == 0) return {0.0, 0};
  if (s.max_value >= -s.min_value) return {s.max_value, s.max_pos};
  return {-s.min_value, s.min_pos};
}

void check_table(const PrimeTable& table, std::int64_t x) {
  if (table.limit() < x) throw std::out_of_range("prime table does not reach x = " + std::to_string(x));
}

}  // namespace

void SumSpec::validate() const {
  if (D < 1 || D > x) {
    throw std::domain_error("SumSpec: need 1 <= D <= x (D=" + std::to_string(D) + ", x=" + std::to_string(x) + ")");
  }
  if (!(B > 0.0)) throw std::domain_error("SumSpec: B must be positive");
  if (sigma_max && !(*sigma_max >= 1.0)) throw std::domain_error("SumSpec: sigma_max must be >= 1");
}

double SumSpec::t_bound() const { return std::pow(static_cast<double>(D), B); }

TGrid default_t_grid(const SumSpec& spec, int divisions) {
  const double log_x = std::log(static_cast<double>(std::max<std::int64_t>(spec.x, 2)));
  return TGrid::covering(spec.t_bound(), std::numbers::pi / (divisions * log_x));
}

// ---------------------------------------------------------------------------
// CoefficientVector

CoefficientVector::CoefficientVector(const PrimeTable& table, std::int64_t D, std::int64_t x) : D_(D), x_(x) {
  if (D < 1 || D > x) throw std::domain_error("CoefficientVector: need 1 <= D <= x");
  check_table(table, x);
  const auto [first, last] = table.range(D, x);
  offset_ = first;
  primes_.assign(table.primes().begin() + static_cast<std::ptrdiff_t>(first),
                 table.primes().begin() + static_cast<std::ptrdiff_t>(last));
  values_.assign(primes_.size(), {0.0, 0.0});
}

CoefficientVector CoefficientVector::ones(const PrimeTable& table, std::int64_t D, std::int64_t x) {
  CoefficientVector a(table, D, x);
  std::fill(a.values_.begin(), a.values_.end(), std::complex<double>(1.0, 0.0));
  return a;
}

CoefficientVector CoefficientVector::random_complex(const PrimeTable& table, std::int64_t D, std::int64_t x,
                                                    std::uint64_t seed) {
  CoefficientVector a(table, D, x);
  Rng rng(seed);
  for (auto& v : a.values_) v = rng.complex_normal();
  return a;
}

CoefficientVector CoefficientVector::random_real(const PrimeTable& table, std::int64_t D, std::int64_t x,
                                                 std::uint64_t seed) {
  CoefficientVector a(table, D, x);
  Rng rng(seed);
  for (auto& v : a.values_) v = {rng.normal(), 0.0};
  return a;
}

CoefficientVector CoefficientVector::from_file(const std::string& path, const PrimeTable& table, std::int64_t D,
                                               std::int64_t x) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read coefficient file '" + path + "'");
  CoefficientVector a(table, D, x);
  std::vector<bool> seen(a.size(), false);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::int64_t p = 0;
    if (!(fields >> p)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 'p re im'");
    }
    double re = 0.0;
    double im = 0.0;
    if (!(fields >> re >> im)) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 'p re im'");
    }
    std::string rest;
    if (fields >> rest) throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": trailing fields");
    if (p <= D || p > x || !table.is_prime(p)) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + std::to_string(p) +
                                  " is not a prime in (" + std::to_string(D) + ", " + std::to_string(x) + "]");
    }
    const std::size_t index = a.index_of(p);
    if (seen[index]) throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": duplicate prime");
    seen[index] = true;
    a.values_[index] = {re, im};
  }
  return a;
}

std::size_t CoefficientVector::index_of(std::int64_t p) const {
  const auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
  if (it == primes_.end() || *it != p) {
    throw std::out_of_range("CoefficientVector: " + std::to_string(p) + " is not a key");
  }
  return static_cast<std::size_t>(it - primes_.begin());
}

std::complex<double> CoefficientVector::at(std::int64_t p) const { return values_[index_of(p)]; }

void CoefficientVector::set(std::int64_t p, std::complex<double> value) { values_[index_of(p)] = value; }

bool CoefficientVector::all_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](auto v) { return v == std::complex<double>(0.0, 0.0); });
}

CoefficientVector CoefficientVector::scaled(std::complex<double> factor) const {
  CoefficientVector out(*this);
  for (auto& v : out.values_) v *= factor;
  return out;
}

CoefficientVector CoefficientVector::conjugated() const {
  CoefficientVector out(*this);
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

double CoefficientVector::weighted_norm2() const {
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < values_.size(); ++i) acc += std::norm(values_[i]) / static_cast<double>(primes_[i]);
  return acc.value();
}

double CoefficientVector::norm2() const {
  CompensatedSum<double> acc;
  for (const auto& v : values_) acc += std::norm(v);
  return acc.value();
}

// ---------------------------------------------------------------------------
// Prime sums

std::vector<std::complex<double>> character_values_at_primes(const Character& chi, const PrimeTable& table,
                                                             std::size_t first, std::size_t last) {
  std::vector<std::complex<double>> out;
  out.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) out.push_back(evaluate(chi, table.primes()[i]));
  return out;
}

namespace {

std::complex<double> prime_sum(const PrimeTable& table, const Character& chi, std::size_t first, std::size_t last,
                               const std::function<std::complex<double>(std::size_t)>& coefficient,
                               std::complex<double> s) {
  ComplexCompensatedSum acc;
  for (std::size_t i = first; i < last; ++i) {
    const std::complex<double> chi_p = evaluate(chi, table.primes()[i]);
    if (chi_p == std::complex<double>(0.0, 0.0)) continue;
    acc += coefficient(i) * chi_p * std::exp(-s * table.log_p()[i]);
  }
  return acc.value();
}

}  // namespace

std::complex<double> char_prime_sum(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                                    std::int64_t w, std::int64_t y, std::complex<double> s) {
  if (w < a.D() || w > y || y > a.x()) {
    throw std::domain_error("char_prime_sum: need D <= w <= y <= x");
  }
  if (s.real() < 1.0) throw std::domain_error("char_prime_sum: Re(s) must be >= 1");
  check_table(table, y);
  const auto [first, last] = table.range(w, y);
  const std::size_t offset = a.table_offset();
  return prime_sum(table, chi, first, last, [&](std::size_t i) { return a[i - offset]; }, s);
}

std::complex<double> char_prime_sum(const PrimeTable& table, const Character& chi, std::int64_t w,
                                    std::int64_t y, std::complex<double> s) {
  if (w < 1 || w > y) throw std::domain_error("char_prime_sum: need 1 <= w <= y");
  if (s.real() < 1.0) throw std::domain_error("char_prime_sum: Re(s) must be >= 1");
  check_table(table, y);
  const auto [first, last] = table.range(w, y);
  return prime_sum(table, chi, first, last, [](std::size_t) { return std::complex<double>(1.0, 0.0); }, s);
}

// ---------------------------------------------------------------------------
// Rectangle maximum

std::vector<double> sigma_grid(std::int64_t x, double sigma_max) {
  std::vector<double> grid{1.0};
  const double h = 1.0 / std::log(static_cast<double>(x) + 2.0);
  for (double offset = h; 1.0 + offset < sigma_max; offset *= 2.0) grid.push_back(1.0 + offset);
  if (sigma_max > 1.0) grid.push_back(sigma_max);
  return grid;
}

namespace {

double auto_sigma_max(std::span<const std::complex<double>> a, std::span<const double> log_p, double m_one) {
  const double target = 1e-3 * m_one;
  auto tail = [&](double sigma) {
    CompensatedSum<double> acc;
    for (std::size_t m = 0; m < a.size(); ++m) acc += std::abs(a[m]) * std::exp(-sigma * log_p[m]);
    return acc.value();
  };
  double lo = 1.0;
  double hi = 2.0;
  while (tail(hi) >= target && hi < 4096.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) < target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

RectangleScan rectangle_scan(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                             const SumSpec& spec, const RectangleOptions& options) {
  spec.validate();
  check_table(table, spec.x);
  if (a.D() != spec.D || a.x() != spec.x) throw std::domain_error("rectangle_max: coefficients do not match (D, x]");
  if (chi.modulus() != spec.D) throw std::domain_error("rectangle_max: character modulus differs from D");

  RectangleScan scan;
  scan.grid = default_t_grid(spec, options.t_divisions);
  const auto [first, last] = table.range(spec.D, spec.x);
  if (first == last) {
    scan.witness = {0.0, spec.x, scan.grid.at(0), 1.0, false};
    scan.sigma_grid = {1.0};
    return scan;
  }
  if (a.all_zero()) throw std::domain_error("rectangle_max: coefficient vector is identically zero");

  const std::size_t n = last - first;
  const std::span<const double> log_p(table.log_p().data() + first, n);
  const auto chi_p = character_values_at_primes(chi, table, first, last);
  std::vector<std::complex<double>> base(n);  // sigma = 1 terms
  for (std::size_t m = 0; m < n; ++m) {
    base[m] = a[m] * chi_p[m] / static_cast<double>(table.primes()[first + m]);
  }
  const TermMode mode = options.real_part ? TermMode::kRealPart : TermMode::kComplex;
  auto prime_at = [&](std::size_t pos) { return table.primes()[first + std::max<std::size_t>(pos, 1) - 1]; };

  std::vector<Candidate> candidates;
  auto scan_row = [&](std::span<const std::complex<double>> coeff, double sigma) {
    const PrefixScanInput input{coeff, log_p, {}};
    const auto rows = scan_t_grid(input, mode, scan.grid);
    double row_max = 0.0;
    std::vector<double> lane_values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto [value, pos] = segment_modulus(rows[i].back(), mode);
      lane_values[i] = value;
      row_max = std::max(row_max, value);
      candidates.push_back({value, scan.grid.at(i), prime_at(pos), sigma, i});
    }
    ++scan.sigma_rows_scanned;
    return lane_values;
  };
  auto refine_at = [&](std::span<const std::complex<double>> coeff, double sigma, double t_center) {
    const PrefixScanInput input{coeff, log_p, {}};
    const double step = scan.grid.step();
    if (step == 0.0) return;
    const double lo = std::max(-scan.grid.half_width, t_center - step);
    const double hi = std::min(scan.grid.half_width, t_center + step);
    auto objective = [&](double t) { return segment_modulus(scan_at(input, mode, t).back(), mode).first; };
    const auto [t_best, f_best] = golden_max(objective, lo, hi, 1e-7 * step);
    const auto [value, pos] = segment_modulus(scan_at(input, mode, t_best).back(), mode);
    (void)f_best;
    candidates.push_back({value, t_best, prime_at(pos), sigma, std::numeric_limits<std::size_t>::max()});
  };

  const auto lane_one = scan_row(base, 1.0);
  const double grid_one_max = *std::max_element(lane_one.begin(), lane_one.end());
  if (options.refine) refine_at(base, 1.0, pick_best(candidates).t);
  const double m_one = pick_best(candidates).value;

  scan.sigma_max = options.sigma_one_only ? 1.0 : spec.sigma_max.value_or(auto_sigma_max(a.values(), log_p, m_one));
  scan.sigma_grid = sigma_grid(spec.x, scan.sigma_max);

  // Partial summation with the decreasing weights p^{1-sigma} <= p_min^{1-sigma}
  // bounds every sigma row by p_min^{1-sigma} times the sigma = 1 row.
  const double log_p_min = log_p[0];
  std::vector<std::complex<double>> weighted(n);
  bool off_line_best = false;
  for (std::size_t r = 1; r < scan.sigma_grid.size(); ++r) {
    const double sigma = scan.sigma_grid[r];
    const double bound = std::exp((1.0 - sigma) * log_p_min) * grid_one_max;
    if (options.prune_sigma && bound < pick_best(candidates).value) continue;
    for (std::size_t m = 0; m < n; ++m) weighted[m] = base[m] * std::exp((1.0 - sigma) * log_p[m]);
    scan_row(weighted, sigma);
    off_line_best = off_line_best || pick_best(candidates).sigma == sigma;
  }
  if (off_line_best && options.refine) {
    const Candidate best = pick_best(candidates);
    for (std::size_t m = 0; m < n; ++m) weighted[m] = base[m] * std::exp((1.0 - best.sigma) * log_p[m]);
    refine_at(weighted, best.sigma, best.t);
  }

  const Candidate& best = pick_best(candidates);
  scan.witness = {best.value, best.y, best.t, best.sigma, best.tag == std::numeric_limits<std::size_t>::max()};
  return scan;
}

RectangleMaxWitness rectangle_max(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                                  const SumSpec& spec, const RectangleOptions& options) {
  return rectangle_scan(table, chi, a, spec, options).witness;
}

// ---------------------------------------------------------------------------
// Lemma scan

std::vector<std::int64_t> dyadic_grid(std::int64_t v, std::int64_t hi) {
  if (v < 1) throw std::domain_error("dyadic_grid: start must be >= 1");
  std::vector<std::int64_t> out;
  for (; v < hi; v *= 2) out.push_back(v);
  out.push_back(hi);
  return out;
}

LemmaScanReport lemma_sup_scan(const PrimeTable& table, const Character& chi, const SumSpec& spec,
                               std::span<const std::int64_t> w_grid, std::span<const std::int64_t> y_grid,
                               const LemmaScanOptions& options) {
  spec.validate();
  check_table(table, spec.x);
  if (chi.modulus() != spec.D) throw std::domain_error("lemma_sup_scan: character modulus differs from D");
  if (is_principal(chi)) throw std::domain_error("lemma_sup_scan: the principal character is excluded");
  if (w_grid.empty()) throw std::domain_error("lemma_sup_scan: empty w grid");
  auto in_range = [&](std::int64_t v) { return v >= spec.D && v <= spec.x; };
  if (!std::all_of(w_grid.begin(), w_grid.end(), in_range) || !std::all_of(y_grid.begin(), y_grid.end(), in_range)) {
    throw std::domain_error("lemma_sup_scan: grid values must lie in [D, x]");
  }

  LemmaScanReport report;
  report.grid = options.grid.value_or(default_t_grid(spec, options.t_divisions));
  const auto [first, last] = table.range(spec.D, spec.x);
  const std::size_t n = last - first;
  const std::span<const double> log_p(table.log_p().data() + first, n);
  const auto chi_p = character_values_at_primes(chi, table, first, last);
  std::vector<std::complex<double>> coeff(n);
  for (std::size_t m = 0; m < n; ++m) coeff[m] = chi_p[m] / static_cast<double>(table.primes()[first + m]);

  auto position = [&](std::int64_t v) { return table.count_le(v) - first; };
  std::vector<std::size_t> raw_checkpoints;
  for (auto w : w_grid) raw_checkpoints.push_back(position(w));
  for (auto y : y_grid) raw_checkpoints.push_back(position(y));
  PrefixScanInput input{coeff, log_p, raw_checkpoints};
  const auto checkpoints = normalized_checkpoints(raw_checkpoints, n);
  auto segment_of = [&](std::size_t pos) {
    return static_cast<std::size_t>(std::lower_bound(checkpoints.begin(), checkpoints.end(), pos) - checkpoints.begin());
  };
  auto prime_at = [&](std::size_t pos) { return table.primes()[first + pos - 1]; };

  // Best Re S(w, y) over admissible y for one t, given that t's segment stats.
  auto best_for_w = [&](const std::vector<SegmentStats>& stats, std::int64_t w) -> std::pair<double, std::int64_t> {
    const std::size_t w_seg = segment_of(position(w));
    const double base = stats[w_seg].end_value.real();
    double value = 0.0;  // y = w
    std::int64_t y_star = w;
    if (y_grid.empty()) {
      for (std::size_t s = w_seg + 1; s < stats.size(); ++s) {
        if (stats[s].max_pos == 0) continue;
        const double v = stats[s].max_value - base;
        if (v > value) {
          value = v;
          y_star = prime_at(stats[s].max_pos);
        }
      }
    } else {
      for (auto y : y_grid) {
        if (y < w) continue;
        const double v = stats[segment_of(position(y))].end_value.real() - base;
        if (v > value || (v == value && y < y_star)) {
          value = v;
          y_star = y;
        }
      }
    }
    return {value, y_star};
  };

  const auto rows = scan_t_grid(input, TermMode::kRealPart, report.grid);
  std::vector<Candidate> per_w;
  for (std::size_t k = 0; k < w_grid.size(); ++k) {
    std::vector<Candidate> lanes;
    lanes.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto [value, y] = best_for_w(rows[i], w_grid[k]);
      lanes.push_back({value, report.grid.at(i), y, 1.0, i});
    }
    const Candidate best = pick_best(lanes);
    per_w.push_back({best.value, best.t, best.y, 1.0, k});
    report.profile.push_back({w_grid[k], best.value, best.y, best.t});
  }

  // Ties go to the smallest w.
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : per_w) top = std::max(top, c.value);
  const double floor = top - kTieRelTol * std::max(std::abs(top), std::numeric_limits<double>::min());
  std::size_t k_star = per_w.size();
  for (std::size_t k = 0; k < per_w.size(); ++k) {
    if (per_w[k].value < floor) continue;
    if (k_star == per_w.size() || w_grid[k] < w_grid[k_star]) k_star = k;
  }

  if (options.refine && report.grid.step() > 0.0) {
    const std::int64_t w = w_grid[k_star];
    const double step = report.grid.step();
    const double t_center = per_w[k_star].t;
    const double lo = std::max(-report.grid.half_width, t_center - step);
    const double hi = std::min(report.grid.half_width, t_center + step);
    auto objective = [&](double t) { return best_for_w(scan_at(input, TermMode::kRealPart, t), w).first; };
    const auto [t_best, f_best] = golden_max(objective, lo, hi, 1e-7 * step);
    (void)f_best;
    const auto [value, y] = best_for_w(scan_at(input, TermMode::kRealPart, t_best), w);
    const Candidate current = per_w[k_star];
    const std::vector<Candidate> pair{current, {value, t_best, y, 1.0, k_star}};
    const Candidate& winner = pick_best(pair);
    if (winner.t != current.t || winner.y != current.y) {
      report.refined = true;
      per_w[k_star] = winner;
      report.profile[k_star] = {w, winner.value, winner.y, winner.t};
    }
  }

  report.max_value = per_w[k_star].value;
  report.w_star = w_grid[k_star];
  report.y_star = per_w[k_star].y;
  report.t_star = per_w[k_star].t;
  return report;
}

// ---------------------------------------------------------------------------
// Abel reduction

AbelReport abel_reduction_check(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                                const SumSpec& spec) {
  RectangleOptions line;
  line.sigma_one_only = true;
  const RectangleScan on_line = rectangle_scan(table, chi, a, spec, line);

  RectangleOptions full;
  full.prune_sigma = false;
  SumSpec full_spec = spec;
  if (!full_spec.sigma_max) {
    // Same height the default rectangle would pick.
    full_spec.sigma_max = rectangle_scan(table, chi, a, spec).sigma_max;
  }
  const RectangleScan rect = rectangle_scan(table, chi, a, full_spec, full);

  AbelReport report;
  report.m_sigma_one = on_line.witness.value;
  report.m_rect = rect.witness.value;
  report.ratio = report.m_sigma_one > 0.0 ? report.m_rect / report.m_sigma_one : 1.0;
  report.within_bound = report.m_rect <= 2.0 * report.m_sigma_one + 1e-6;
  report.sigma_one_witness = on_line.witness;
  report.rect_witness = rect.witness;
  report.sigma_grid = rect.sigma_grid;
  return report;
}

void write_lemma_profile_csv(std::ostream& os, const PrimeTable& table, const Character& chi,
                             const LemmaScanReport& report) {
  os << "w,y,t,sigma,re_value,abs_value\n";
  os << std::setprecision(17);
  for (const auto& e : report.profile) {
    const auto s = char_prime_sum(table, chi, e.w, e.y_star, {1.0, e.t_star});
    os << e.w << ',' << e.y_star << ',' << e.t_star << ',' << 1.0 << ',' << e.value << ',' << std::abs(s) << '\n';
  }
}

}  // namespace lsieve
