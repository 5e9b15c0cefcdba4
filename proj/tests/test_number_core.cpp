#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lsieve/number_core.hpp"
#include "lsieve/random.hpp"

using namespace lsieve;

namespace {

bool is_prime_by_trial_division(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::int64_t multiplicative_order(std::int64_t g, std::int64_t q) {
  std::int64_t x = g % q;
  for (std::int64_t k = 1; k <= q; ++k) {
    if (x == 1) return k;
    x = x * g % q;
  }
  return 0;
}

}  // namespace

TEST_CASE("sieve_primes small cases") {
  CHECK(sieve_primes(10).primes() == std::vector<std::int64_t>{2, 3, 5, 7});
  CHECK(sieve_primes(2).primes() == std::vector<std::int64_t>{2});
  CHECK_THROWS_AS(sieve_primes(1), std::out_of_range);
  CHECK_THROWS_AS(sieve_primes(kMaxSieveLimit + 1), std::out_of_range);
  CHECK_THROWS_AS(sieve_primes(1000, 999), std::out_of_range);
}

TEST_CASE("sieve_primes matches trial division up to 10^6") {
  const PrimeTable table = sieve_primes(1'000'000);
  std::size_t count = 0;
  for (std::int64_t n = 2; n <= 1'000'000; ++n) count += is_prime_by_trial_division(n) ? 1 : 0;
  CHECK(table.size() == count);
  CHECK(count == 78498);
  CHECK(std::is_sorted(table.primes().begin(), table.primes().end()));
  CHECK(std::adjacent_find(table.primes().begin(), table.primes().end()) == table.primes().end());
}

TEST_CASE("segmented range agrees with trial division") {
  const std::int64_t limit = kSegmentedSieveThreshold + 2000;
  const PrimeTable table = sieve_primes(limit);
  const auto [first, last] = table.range(kSegmentedSieveThreshold - 2000, limit);
  std::vector<std::int64_t> expected;
  for (std::int64_t n = kSegmentedSieveThreshold - 1999; n <= limit; ++n) {
    if (is_prime_by_trial_division(n)) expected.push_back(n);
  }
  const std::vector<std::int64_t> got(table.primes().begin() + static_cast<std::ptrdiff_t>(first),
                                      table.primes().begin() + static_cast<std::ptrdiff_t>(last));
  CHECK(got == expected);
}

TEST_CASE("recip_prefix is a compensated running sum of 1/p") {
  const PrimeTable table = sieve_primes(100'000);
  const auto& prefix = table.recip_prefix();
  REQUIRE(prefix.size() == table.size());
  CHECK(prefix[0] == doctest::Approx(0.5));
  for (std::size_t i = 1; i < prefix.size(); ++i) {
    REQUIRE(prefix[i] >= prefix[i - 1]);
    const double step = prefix[i] - prefix[i - 1];
    REQUIRE(std::abs(step - 1.0 / static_cast<double>(table.primes()[i])) <= 4 * 1e-16 * prefix[i]);
  }
}

TEST_CASE("factorize") {
  CHECK(factorize(1).pairs.empty());
  CHECK(factorize(12).pairs == std::vector<std::pair<std::int64_t, int>>{{2, 2}, {3, 1}});
  CHECK(factorize(784).pairs == std::vector<std::pair<std::int64_t, int>>{{2, 4}, {7, 2}});
  CHECK(factorize(784).value() == 784);
  CHECK_THROWS_AS(factorize(0), std::domain_error);
  CHECK_THROWS_AS(factorize(-6), std::domain_error);

  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::int64_t>(rng.next() % 10'000'000) + 1;
    const Factorization f = factorize(n);
    REQUIRE(f.value() == n);
    for (std::size_t i = 0; i < f.pairs.size(); ++i) {
      REQUIRE(is_prime_by_trial_division(f.pairs[i].first));
      REQUIRE(f.pairs[i].second >= 1);
      if (i > 0) REQUIRE(f.pairs[i - 1].first < f.pairs[i].first);
    }
  }
}

TEST_CASE("euler_phi against a gcd count") {
  for (std::int64_t n = 1; n <= 300; ++n) {
    std::int64_t count = 0;
    for (std::int64_t k = 1; k <= n; ++k) count += std::gcd(k, n) == 1 ? 1 : 0;
    REQUIRE(euler_phi(n) == count);
  }
}

TEST_CASE("primitive_root examples") {
  CHECK(primitive_root(5) == 2);
  CHECK(primitive_root(4) == 3);
  CHECK(primitive_root(9) == 2);
  CHECK(primitive_root(2) == 1);
  CHECK(multiplicative_order(2, 5) == 4);
  CHECK(multiplicative_order(2, 9) == 6);
  CHECK_THROWS_AS(primitive_root(8), std::domain_error);
  CHECK_THROWS_AS(primitive_root(12), std::domain_error);
  CHECK_THROWS_AS(primitive_root(15), std::domain_error);
  CHECK_THROWS_AS(primitive_root(1), std::domain_error);
}

TEST_CASE("primitive_root is the smallest generator for odd prime powers") {
  for (std::int64_t q = 3; q < 2000; ++q) {
    const auto f = factorize(q);
    if (f.pairs.size() != 1 || f.pairs.front().first == 2) continue;
    const std::int64_t g = primitive_root(q);
    const std::int64_t phi = euler_phi(q);
    REQUIRE(multiplicative_order(g, q) == phi);
    for (auto [r, e] : factorize(phi).pairs) REQUIRE(pow_mod(g, phi / r, q) != 1);
    for (std::int64_t h = 2; h < g; ++h) {
      if (std::gcd(h, q) == 1) REQUIRE(multiplicative_order(h, q) != phi);
    }
  }
}

TEST_CASE("sum_reciprocal_primes") {
  const PrimeTable table = sieve_primes(1000);
  CHECK(sum_reciprocal_primes(2, 10, table) == doctest::Approx(71.0 / 105.0).epsilon(1e-15));
  CHECK(sum_reciprocal_primes(1, 10, table) == doctest::Approx(247.0 / 210.0).epsilon(1e-15));
  CHECK(sum_reciprocal_primes(10, 10, table) == 0.0);
  CHECK(sum_reciprocal_primes(8, 10, table) == 0.0);
  CHECK_THROWS_AS(sum_reciprocal_primes(11, 10, table), std::domain_error);
  CHECK_THROWS_AS(sum_reciprocal_primes(1, 1001, table), std::out_of_range);
}

TEST_CASE("sum_reciprocal_primes agrees with prefix differences") {
  const PrimeTable table = sieve_primes(200'000);
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = static_cast<std::int64_t>(rng.next() % 200'000) + 1;
    auto b = static_cast<std::int64_t>(rng.next() % 200'000) + 1;
    if (a > b) std::swap(a, b);
    const std::size_t lo = table.count_le(a);
    const std::size_t hi = table.count_le(b);
    const double before = lo == 0 ? 0.0 : table.recip_prefix()[lo - 1];
    const double upto = hi == 0 ? 0.0 : table.recip_prefix()[hi - 1];
    REQUIRE(std::abs(sum_reciprocal_primes(a, b, table) - (upto - before)) <= 1e-12);
  }
}

TEST_CASE("compensated_sum") {
  CHECK(compensated_sum(std::span<const std::complex<double>>{}) == std::complex<double>(0.0, 0.0));
  const std::vector<double> cancel{1.0, -1.0, 1e-16};
  CHECK(compensated_sum(cancel) == 1e-16);
  const std::vector<std::complex<double>> tenths(1'000'000, {0.1, -0.1});
  const auto total = compensated_sum(tenths);
  CHECK(std::abs(total.real() - 1e5) <= 1e-9);
  CHECK(std::abs(total.imag() + 1e5) <= 1e-9);
  // Absorbed addends are recovered.
  const std::vector<double> big_small{1e16, 1.0, -1e16};
  CHECK(compensated_sum(big_small) == 1.0);
}

TEST_CASE("compensated_sum is insensitive to permutation") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::complex<double>> values(20'000);
    for (auto& v : values) v = rng.complex_normal() * std::exp(8.0 * rng.normal());
    const auto reference = compensated_sum(values);
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.next() % (i + 1)]);
    std::vector<std::complex<double>> shuffled;
    for (auto i : order) shuffled.push_back(values[i]);
    const auto permuted = compensated_sum(shuffled);
    double scale = 0.0;
    for (auto v : values) scale += std::abs(v);
    REQUIRE(std::abs(permuted - reference) <= 1e-10 * std::max(std::abs(reference), 1e-300) + 1e-15 * scale);
  }
}
