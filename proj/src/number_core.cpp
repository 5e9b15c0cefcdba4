#include "lsieve/number_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsieve {

std::complex<double> compensated_sum(std::span<const std::complex<double>> values) {
  ComplexCompensatedSum acc;
  for (const auto& v : values) acc += v;
  return acc.value();
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum<double> acc;
  for (double v : values) acc += v;
  return acc.value();
}

PrimeTable::PrimeTable(std::int64_t limit, std::vector<std::int64_t> primes)
    : limit_(limit), primes_(std::move(primes)) {
  log_p_.reserve(primes_.size());
  recip_prefix_.reserve(primes_.size());
  CompensatedSum<double> acc;
  for (std::int64_t p : primes_) {
    log_p_.push_back(std::log(static_cast<double>(p)));
    acc += 1.0 / static_cast<double>(p);
    recip_prefix_.push_back(acc.value());
  }
}

std::size_t PrimeTable::count_le(std::int64_t v) const {
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), v) - primes_.begin());
}

std::pair<std::size_t, std::size_t> PrimeTable::range(std::int64_t lo, std::int64_t hi) const {
  const std::size_t first = count_le(lo);
  const std::size_t last = std::max(first, count_le(hi));
  return {first, last};
}

bool PrimeTable::is_prime(std::int64_t n) const {
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

namespace {

std::vector<std::int64_t> simple_sieve(std::int64_t limit) {
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  std::vector<std::int64_t> primes;
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    primes.push_back(i);
    for (std::int64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return primes;
}

std::vector<std::int64_t> segmented_sieve(std::int64_t limit) {
  constexpr std::int64_t kSegment = 1 << 18;
  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  const std::vector<std::int64_t> base = simple_sieve(root);

  std::vector<std::int64_t> primes;
  primes.reserve(static_cast<std::size_t>(1.1 * static_cast<double>(limit) / std::log(static_cast<double>(limit))));
  std::vector<char> composite(kSegment);
  for (std::int64_t low = 2; low <= limit; low += kSegment) {
    const std::int64_t high = std::min(low + kSegment - 1, limit);
    std::fill(composite.begin(), composite.end(), 0);
    for (std::int64_t p : base) {
      if (p * p > high) break;
      std::int64_t start = std::max(p * p, ((low + p - 1) / p) * p);
      for (std::int64_t j = start; j <= high; j += p) composite[static_cast<std::size_t>(j - low)] = 1;
    }
    for (std::int64_t n = low; n <= high; ++n) {
      if (!composite[static_cast<std::size_t>(n - low)]) primes.push_back(n);
    }
  }
  return primes;
}

}  // namespace

PrimeTable sieve_primes(std::int64_t limit, std::int64_t max_limit) {
  if (limit < 2 || limit > max_limit) {
    throw std::out_of_range("sieve_primes: limit " + std::to_string(limit) + " outside [2, " +
                            std::to_string(max_limit) + "]");
  }
  auto primes = limit > kSegmentedSieveThreshold ? segmented_sieve(limit) : simple_sieve(limit);
  return PrimeTable(limit, std::move(primes));
}

std::int64_t Factorization::value() const {
  std::int64_t n = 1;
  for (auto [p, e] : pairs) {
    for (int i = 0; i < e; ++i) n *= p;
  }
  return n;
}

Factorization factorize(std::int64_t n) {
  if (n <= 0) throw std::domain_error("factorize: n must be positive, got " + std::to_string(n));
  Factorization f;
  for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.pairs.emplace_back(p, e);
  }
  if (n > 1) f.pairs.emplace_back(n, 1);
  return f;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    const std::int64_t r = a % b;
    a = b;
    b = r;
  }
  return a;
}

std::int64_t lcm(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return a / gcd(a, b) * b;
}

std::int64_t euler_phi(std::int64_t n) {
  std::int64_t phi = n;
  for (auto [p, e] : factorize(n).pairs) phi = phi / p * (p - 1);
  return phi;
}

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t result = 1;
  base %= m;
  if (base < 0) base += m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::int64_t primitive_root(std::int64_t q) {
  if (q == 2) return 1;
  if (q == 4) return 3;
  const Factorization f = q >= 3 ? factorize(q) : Factorization{};
  if (f.pairs.size() != 1 || f.pairs.front().first == 2) {
    throw std::domain_error("primitive_root: unit group mod " + std::to_string(q) + " is not cyclic");
  }
  const std::int64_t order = euler_phi(q);
  const Factorization order_factors = factorize(order);
  for (std::int64_t g = 2; g < q; ++g) {
    if (gcd(g, q) != 1) continue;
    bool generator = true;
    for (auto [r, e] : order_factors.pairs) {
      if (pow_mod(g, order / r, q) == 1) {
        generator = false;
        break;
      }
    }
    if (generator) return g;
  }
  throw std::logic_error("primitive_root: no generator found mod " + std::to_string(q));
}

double sum_reciprocal_primes(std::int64_t D, std::int64_t x, const PrimeTable& table) {
  if (D > x) throw std::domain_error("sum_reciprocal_primes: D > x");
  if (D < 1) throw std::out_of_range("sum_reciprocal_primes: D < 1");
  if (x > table.limit()) throw std::out_of_range("sum_reciprocal_primes: x exceeds prime table");
  const auto [first, last] = table.range(D, x);
  CompensatedSum<double> acc;
  for (std::size_t i = first; i < last; ++i) acc += 1.0 / static_cast<double>(table.primes()[i]);
  return acc.value();
}

}  // namespace lsieve
