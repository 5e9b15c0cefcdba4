#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsieve/characters.hpp"
#include "lsieve/euler_sums.hpp"
#include "lsieve/number_core.hpp"

namespace lsieve {

/// One row of the delta matrix: entry(p) = chi(p) p^{-1/2 - i t} for D < p <= y, else 0.
struct DeltaRow {
  Character chi;
  double t = 0.0;
  std::int64_t y = 0;
};

struct DeltaOptions {
  /// Accept repeated characters. Only test fixtures should need this.
  bool allow_duplicates = false;
};

/// k x n matrix over the primes D < p <= x, either defined by character rows or
/// given directly as a dense fixture (columns are then abstract indices).
class DeltaMatrix {
 public:
  /// Validates: equal lengths, k >= 1, |t_j| <= D^B, D <= y_j <= x, moduli equal
  /// to D, distinct characters unless allowed. Throws std::domain_error.
  static DeltaMatrix build(const PrimeTable& table, std::span<const Character> characters,
                           std::span<const double> shifts, std::span<const std::int64_t> cutoffs,
                           const SumSpec& spec, const DeltaOptions& options = {});
  static DeltaMatrix synthetic(Eigen::MatrixXcd entries);

  [[nodiscard]] bool is_synthetic() const { return synthetic_; }
  [[nodiscard]] std::size_t k() const { return static_cast<std::size_t>(dense_.rows()); }
  [[nodiscard]] std::size_t columns() const { return static_cast<std::size_t>(dense_.cols()); }
  [[nodiscard]] const std::vector<DeltaRow>& rows() const { return rows_; }
  /// Column primes; empty for a synthetic matrix.
  [[nodiscard]] std::span<const std::int64_t> primes() const { return primes_; }
  [[nodiscard]] const SumSpec& spec() const { return spec_; }
  [[nodiscard]] const Eigen::MatrixXcd& dense() const { return dense_; }
  [[nodiscard]] std::complex<double> entry(std::size_t j, std::size_t column) const {
    return dense_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(column));
  }

 private:
  bool synthetic_ = false;
  SumSpec spec_;
  std::vector<DeltaRow> rows_;
  std::vector<std::int64_t> primes_;
  Eigen::MatrixXcd dense_;
};

DeltaMatrix build_delta(const PrimeTable& table, std::span<const Character> characters,
                        std::span<const double> shifts, std::span<const std::int64_t> cutoffs, const SumSpec& spec,
                        const DeltaOptions& options = {});

/// M_{jl} = sum_p delta_{j,p} conj(delta_{l,p}). Character rows go through
/// char_prime_sum of chi_j conj(chi_l) at s = 1 + i(t_j - t_l); synthetic ones
/// through the dense product.
Eigen::MatrixXcd gram_matrix(const PrimeTable& table, const DeltaMatrix& delta);

/// Delta Delta^* from the materialized matrix.
Eigen::MatrixXcd dense_gram(const DeltaMatrix& delta);

/// Re sum_{D < p <= y} chi_j conj(chi_l)(p) p^{-1 - i t_j + i t_l}.
double cross_term(const PrimeTable& table, const Character& chi_j, const Character& chi_l, double t_j, double t_l,
                  std::int64_t y, const SumSpec& spec);

struct C1Estimate {
  double c1 = 0.0;        // clamped at 0
  double raw_max = 0.0;   // before clamping
  std::size_t distinct_quotients = 0;
  std::optional<Character> worst_quotient;  // chi_j conj(chi_l) at the maximum
  LemmaScanReport worst;
};

struct C1Options {
  int t_divisions = 8;
  /// Split every interval of the difference grid this many times.
  std::size_t subdivide = 1;
  bool refine = true;
};

/// Empirical stand-in for the cross-term constant: the largest
/// Re sum_{D<p<=y} psi(p) p^{-1-iu} over psi = chi_j conj(chi_l) (j != l),
/// every prime y and u on the difference grid of default_t_grid over
/// [-2 D^B, 2 D^B]. Throws std::domain_error for fewer than two characters.
C1Estimate estimate_c1(const PrimeTable& table, std::span<const Character> characters, const SumSpec& spec,
                       const C1Options& options = {});

struct PowerIterationOptions {
  std::uint64_t seed = 1;
  double residual_tolerance = 1e-10;  // relative to trace
  std::size_t max_iterations = 100'000;
  double hermitian_tolerance = 1e-12;
};

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXcd vector;  // unit norm, largest component real positive
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
/// Throws std::domain_error if M is not Hermitian within tolerance.
EigenPair top_eigenpair(const Eigen::MatrixXcd& m, const PowerIterationOptions& options = {});

struct DualityReport {
  double lambda_gram = 0.0;   // k x k side
  double lambda_prime = 0.0;  // power iteration on Delta^* Delta
  double lambda_rel_diff = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double max_trial_quotient = 0.0;  // max ||Delta a||^2 / ||a||^2 over random a
  double pullback_quotient = 0.0;   // same for a = Delta^* v
  double pullback_rel_error = 0.0;
  bool passed = false;
};

/// Numerical duality: both sides share lambda_max, random a never beat it,
/// and the pullback of the top eigenvector attains it.
DualityReport duality_check(const DeltaMatrix& delta, std::size_t trials, std::uint64_t seed,
                            const PrimeTable* table = nullptr);

struct FourWaySplit {
  /// Parts summing to b: max(Re b, 0), min(Re b, 0), i max(Im b, 0), i min(Im b, 0).
  std::array<Eigen::VectorXcd, 4> parts;
  /// Nonnegative magnitudes with parts[r] = phases[r] * magnitudes[r].
  std::array<Eigen::VectorXd, 4> magnitudes;
  static constexpr std::array<std::complex<double>, 4> phases{
      std::complex<double>(1.0, 0.0), std::complex<double>(-1.0, 0.0), std::complex<double>(0.0, 1.0),
      std::complex<double>(0.0, -1.0)};
};

FourWaySplit four_way_split(const Eigen::VectorXcd& b);

/// b^* M b
double quadratic_form(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& b);

/// a_p p^{-1/2}: the coefficients the dual inequality is stated for.
Eigen::VectorXcd rescale_to_dual(const CoefficientVector& a);

struct WitnessEntry {
  std::size_t character_index = 0;
  RectangleMaxWitness witness;
};

struct VerificationReport {
  std::int64_t D = 0;
  std::int64_t x = 0;
  double B = 0.0;
  std::size_t k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double c_used = 0.0;
  double L = 0.0;              // sum_{D<p<=x} 1/p
  double weighted_norm = 0.0;  // sum |a_p|^2 / p
  /// The dual display's normalization 4(L + (c/4) k), next to the (4L + (k-1)c) one.
  double rhs_dual_form = 0.0;
  double ratio_dual_form = 0.0;
  /// Largest Gram eigenvalue at the witnesses; lhs <= lambda_max * weighted_norm.
  std::optional<double> lambda_max;
  std::optional<std::uint64_t> seed;
  std::vector<WitnessEntry> witnesses;
  bool passed = false;
};

struct VerifyOptions {
  RectangleOptions rectangle;
  bool compute_lambda = true;
};

/// lhs = sum_j (rectangle max for chi_j)^2 against rhs = (4L + (k-1)c) sum |a_p|^2/p.
/// Throws std::domain_error for duplicate characters, all-zero a, or c < 0.
VerificationReport verify_theorem(const PrimeTable& table, const CoefficientVector& a,
                                  std::span<const Character> characters, const SumSpec& spec, double c,
                                  const VerifyOptions& options = {});

/// Real-part form: the sums are sum a_p Re(chi_j(p) p^{-s}) (Re of the full term
/// for complex a), rhs = 2(L + k c) sum |a_p|^2/p. Conjugate pairs may both be
/// listed; exact duplicates are still rejected.
VerificationReport variant_re_bound(const PrimeTable& table, const CoefficientVector& a,
                                    std::span<const Character> characters, const SumSpec& spec, double c,
                                    const VerifyOptions& options = {});

struct ExtremalReport {
  std::size_t k = 0;
  double L = 0.0;
  double c1 = 0.0;
  double lambda_max = 0.0;
  double ratio_to_L = 0.0;         // lambda_max / L
  double ratio_to_real_bound = 0.0;  // lambda_max / (L + (k-1) c1)
  double max_diagonal = 0.0;
  double lambda_diagonal_only = 0.0;  // off-diagonals zeroed
  Eigen::VectorXcd eigenvector;
  /// Theorem-form coefficients a_p attaining the dual extremum (unit dual norm).
  std::vector<std::complex<double>> extremal_coefficients;
  std::vector<std::int64_t> primes;
};

ExtremalReport extremal_ratio(const PrimeTable& table, std::span<const Character> characters,
                              const SumSpec& spec, std::span<const double> shifts,
                              std::span<const std::int64_t> cutoffs, double c1, const DeltaOptions& options = {});

/// The constant handed to verify_theorem when none is supplied.
inline double default_c_from_c1(double c1) { return 4.0 * c1; }

}  // namespace lsieve
