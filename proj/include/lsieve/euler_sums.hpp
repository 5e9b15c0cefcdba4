#pragma once

// Truncated Euler-product prime sums
//
//   S(w, y, s) = sum_{w < p <= y} a_p chi(p) p^{-s},   s = sigma + i t,
//
// and their maxima over y <= x and the rectangle sigma >= 1, |t| <= D^B.

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lsieve/characters.hpp"
#include "lsieve/number_core.hpp"
#include "lsieve/prefix_scan.hpp"

namespace lsieve {

/// Two values within this relative distance count as a tie when picking an argmax.
inline constexpr double kTieRelTol = 1e-12;

struct SumSpec {
  std::int64_t D = 1;
  std::int64_t x = 2;
  double B = 1.0;
  /// Rectangle height; nullopt selects it automatically (see rectangle_max).
  std::optional<double> sigma_max;

  /// Throws std::domain_error unless 1 <= D <= x, B > 0, sigma_max >= 1.
  void validate() const;
  /// D^B, the bound on |t|.
  [[nodiscard]] double t_bound() const;
};

/// Default t grid: spacing at most pi / (divisions * ln x) over [-D^B, D^B].
TGrid default_t_grid(const SumSpec& spec, int divisions = 8);

/// Coefficients a_p for the primes D < p <= x, stored densely in prime order.
class CoefficientVector {
 public:
  CoefficientVector(const PrimeTable& table, std::int64_t D, std::int64_t x);

  static CoefficientVector ones(const PrimeTable& table, std::int64_t D, std::int64_t x);
  /// Independent standard complex normals.
  static CoefficientVector random_complex(const PrimeTable& table, std::int64_t D, std::int64_t x,
                                          std::uint64_t seed);
  static CoefficientVector random_real(const PrimeTable& table, std::int64_t D, std::int64_t x,
                                       std::uint64_t seed);
  /// Lines "p re im"; '#' starts a comment. Unlisted primes get 0. A p that is
  /// not a prime in (D, x] is an error (std::invalid_argument), as is an
  /// unreadable file (std::runtime_error).
  static CoefficientVector from_file(const std::string& path, const PrimeTable& table, std::int64_t D,
                                     std::int64_t x);

  [[nodiscard]] std::int64_t D() const { return D_; }
  [[nodiscard]] std::int64_t x() const { return x_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const std::int64_t> primes() const { return primes_; }
  [[nodiscard]] std::span<const std::complex<double>> values() const { return values_; }
  /// Index of the first prime > D in the table this vector was built from.
  [[nodiscard]] std::size_t table_offset() const { return offset_; }

  /// a_p; throws std::out_of_range if p is not one of the keys.
  [[nodiscard]] std::complex<double> at(std::int64_t p) const;
  void set(std::int64_t p, std::complex<double> value);
  std::complex<double>& operator[](std::size_t index) { return values_[index]; }
  const std::complex<double>& operator[](std::size_t index) const { return values_[index]; }

  [[nodiscard]] bool all_zero() const;
  [[nodiscard]] CoefficientVector scaled(std::complex<double> factor) const;
  [[nodiscard]] CoefficientVector conjugated() const;
  /// sum |a_p|^2 / p
  [[nodiscard]] double weighted_norm2() const;
  /// sum |a_p|^2
  [[nodiscard]] double norm2() const;

 private:
  [[nodiscard]] std::size_t index_of(std::int64_t p) const;

  std::int64_t D_;
  std::int64_t x_;
  std::size_t offset_ = 0;
  std::vector<std::int64_t> primes_;
  std::vector<std::complex<double>> values_;
};

/// chi(p) for the primes at table indices [first, last).
std::vector<std::complex<double>> character_values_at_primes(const Character& chi, const PrimeTable& table,
                                                             std::size_t first, std::size_t last);

/// sum_{w < p <= y} a_p chi(p) p^{-s}, compensated, ascending in p.
/// Requires a.D() <= w <= y <= a.x() and Re(s) >= 1 (std::domain_error otherwise).
std::complex<double> char_prime_sum(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                                    std::int64_t w, std::int64_t y, std::complex<double> s);

/// The a_p = 1 case: sum_{w < p <= y} chi(p) p^{-s}. Requires 1 <= w <= y <= table.limit().
std::complex<double> char_prime_sum(const PrimeTable& table, const Character& chi, std::int64_t w,
                                    std::int64_t y, std::complex<double> s);

struct RectangleMaxWitness {
  double value = 0.0;  // max modulus
  std::int64_t y_star = 0;
  double t_star = 0.0;
  double sigma_star = 1.0;
  bool refined = false;  // golden-section refinement improved on the grid
};

struct RectangleOptions {
  int t_divisions = 8;
  bool refine = true;
  /// Skip sigma > 1 rows whose partial-summation bound cannot beat the sigma = 1
  /// maximum. This is exact, not a heuristic; turn it off to brute-force every row.
  bool prune_sigma = true;
  /// Scan sigma = 1 only.
  bool sigma_one_only = false;
  /// Sum Re(a_p chi(p) p^{-s}) instead of a_p chi(p) p^{-s}.
  bool real_part = false;
};

struct RectangleScan {
  RectangleMaxWitness witness;
  double sigma_max = 1.0;
  std::vector<double> sigma_grid;
  std::size_t sigma_rows_scanned = 0;
  TGrid grid;
};

/// max over D < y <= x, 1 <= sigma <= sigma_max, |t| <= D^B of |S(D, y, s)|.
///
/// y is exact (every prime is a prefix end). t runs over default_t_grid with a
/// golden-section polish around the best cell. sigma runs over
/// {1, 1 + h, 1 + 2h, 1 + 4h, ...} with h = 1 / ln(x + 2), capped at
/// sigma_max. Without an explicit sigma_max it is the smallest sigma with
/// sum |a_p| p^{-sigma} < 1e-3 * (sigma = 1 maximum).
///
/// Ties (relative 1e-12) go to the smallest t, then y, then sigma.
/// Throws std::domain_error for all-zero a; an empty prime range gives value 0.
RectangleScan rectangle_scan(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                             const SumSpec& spec, const RectangleOptions& options = {});

RectangleMaxWitness rectangle_max(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                                  const SumSpec& spec, const RectangleOptions& options = {});

/// The sigma rows used by rectangle_scan for a given height.
std::vector<double> sigma_grid(std::int64_t x, double sigma_max);

struct LemmaProfileEntry {
  std::int64_t w = 0;
  double value = 0.0;  // max over y and t of Re S(w, y, 1 + it)
  std::int64_t y_star = 0;
  double t_star = 0.0;
};

struct LemmaScanReport {
  double max_value = 0.0;
  std::int64_t w_star = 0;
  std::int64_t y_star = 0;
  double t_star = 0.0;
  bool refined = false;
  std::vector<LemmaProfileEntry> profile;  // one entry per w
  TGrid grid;
};

struct LemmaScanOptions {
  int t_divisions = 8;
  /// Overrides the default grid (used by estimate_c1 for the difference grid).
  std::optional<TGrid> grid;
  bool refine = true;
};

/// Empirical sup of Re sum_{w < p <= y} chi(p) p^{-1-it} over w in w_grid,
/// y >= w (in y_grid, or every prime when y_grid is empty; y = w counts as the
/// empty sum) and t on the grid. Grid values must lie in [D, x].
/// Throws std::domain_error for principal chi.
LemmaScanReport lemma_sup_scan(const PrimeTable& table, const Character& chi, const SumSpec& spec,
                               std::span<const std::int64_t> w_grid, std::span<const std::int64_t> y_grid,
                               const LemmaScanOptions& options = {});

/// {v, 2v, 4v, ...} below hi, then hi.
std::vector<std::int64_t> dyadic_grid(std::int64_t v, std::int64_t hi);

struct AbelReport {
  double m_sigma_one = 0.0;  // max over y, t at sigma = 1
  double m_rect = 0.0;       // max over the full sigma grid, no pruning
  double ratio = 1.0;
  bool within_bound = true;  // m_rect <= 2 m_sigma_one + 1e-6
  RectangleMaxWitness sigma_one_witness;
  RectangleMaxWitness rect_witness;
  std::vector<double> sigma_grid;
};

/// Checks that moving off sigma = 1 does not raise the rectangle maximum by
/// more than the partial-summation factor 2.
AbelReport abel_reduction_check(const PrimeTable& table, const Character& chi, const CoefficientVector& a,
                                const SumSpec& spec);

/// CSV with columns w,y,t,sigma,re_value,abs_value, one row per profile entry.
void write_lemma_profile_csv(std::ostream& os, const PrimeTable& table, const Character& chi,
                             const LemmaScanReport& report);

}  // namespace lsieve
