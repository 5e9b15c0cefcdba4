#pragma once

// Primes, factorization, primitive roots and compensated summation.
// Everything else in lsieve is built on these.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace lsieve {

/// Hard cap on sieve_primes. Above this the table no longer fits comfortably.
inline constexpr std::int64_t kMaxSieveLimit = 100'000'000;

/// Limits above this are sieved segment by segment.
inline constexpr std::int64_t kSegmentedSieveThreshold = 10'000'000;

/// Compensated (Kahan-Babuska / Neumaier) accumulator.
///
/// Unlike plain Kahan it also handles the case where an addend is larger in
/// magnitude than the running sum, so [1, -1, 1e-16] sums to 1e-16.
template <typename Real>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Real initial) : sum_(initial) {}

  CompensatedSum& operator+=(Real value) {
    const Real t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator-=(Real value) { return *this += -value; }

  [[nodiscard]] Real value() const { return sum_ + compensation_; }

 private:
  Real sum_{0};
  Real compensation_{0};
};

/// Componentwise compensated accumulator for complex values.
class ComplexCompensatedSum {
 public:
  ComplexCompensatedSum& operator+=(std::complex<double> value) {
    re_ += value.real();
    im_ += value.imag();
    return *this;
  }

  [[nodiscard]] std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_;
  CompensatedSum<double> im_;
};

/// Sum a sequence with compensation, in input order.
std::complex<double> compensated_sum(std::span<const std::complex<double>> values);
double compensated_sum(std::span<const double> values);

/// All primes up to `limit`, with per-prime logs and prefix sums of 1/p.
///
/// Immutable after construction; share it freely between threads.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::int64_t limit, std::vector<std::int64_t> primes);

  [[nodiscard]] std::int64_t limit() const { return limit_; }
  [[nodiscard]] const std::vector<std::int64_t>& primes() const { return primes_; }
  [[nodiscard]] const std::vector<double>& log_p() const { return log_p_; }
  /// recip_prefix()[i] = sum of 1/p over primes()[0..i].
  [[nodiscard]] const std::vector<double>& recip_prefix() const { return recip_prefix_; }
  [[nodiscard]] std::size_t size() const { return primes_.size(); }

  /// Number of primes <= v.
  [[nodiscard]] std::size_t count_le(std::int64_t v) const;

  /// Index range [first, last) of primes p with lo < p <= hi.
  [[nodiscard]] std::pair<std::size_t, std::size_t> range(std::int64_t lo, std::int64_t hi) const;

  [[nodiscard]] bool is_prime(std::int64_t n) const;

 private:
  std::int64_t limit_ = 0;
  std::vector<std::int64_t> primes_;
  std::vector<double> log_p_;
  std::vector<double> recip_prefix_;
};

/// Sieve of Eratosthenes; segmented above kSegmentedSieveThreshold.
/// Throws std::out_of_range unless 2 <= limit <= max_limit.
PrimeTable sieve_primes(std::int64_t limit, std::int64_t max_limit = kMaxSieveLimit);

struct Factorization {
  std::vector<std::pair<std::int64_t, int>> pairs;  // (prime, exponent), ascending

  [[nodiscard]] std::int64_t value() const;
  friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Trial division. Throws std::domain_error for n <= 0.
Factorization factorize(std::int64_t n);

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t lcm(std::int64_t a, std::int64_t b);
std::int64_t euler_phi(std::int64_t n);
std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m);
std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t m);

/// Smallest generator of (Z/qZ)^*. Requires q in {2, 4} or an odd prime power;
/// anything else throws std::domain_error.
std::int64_t primitive_root(std::int64_t q);

/// L = sum of 1/p over primes D < p <= x, summed in ascending order with
/// compensation. Throws std::domain_error if D > x, std::out_of_range if the
/// table does not reach x or D < 1.
double sum_reciprocal_primes(std::int64_t D, std::int64_t x, const PrimeTable& table);

}  // namespace lsieve
