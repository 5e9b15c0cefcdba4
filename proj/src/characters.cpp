#include "lsieve/characters.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lsieve/number_core.hpp"

namespace lsieve {

namespace {

UnitCycle cyclic_component(std::int64_t q) {
  const std::int64_t g = primitive_root(q);
  UnitCycle cycle{q, g, euler_phi(q), std::vector<std::int64_t>(static_cast<std::size_t>(q), -1)};
  std::int64_t power = 1;
  for (std::int64_t e = 0; e < cycle.length; ++e) {
    cycle.dlog[static_cast<std::size_t>(power)] = e;
    power = mul_mod(power, g, q);
  }
  return cycle;
}

}  // namespace

UnitGroupBasis::UnitGroupBasis(std::int64_t modulus) : modulus_(modulus) {
  if (modulus < 1) throw std::domain_error("UnitGroupBasis: modulus must be >= 1");
  for (auto [p, e] : factorize(modulus).pairs) {
    std::int64_t q = 1;
    for (int i = 0; i < e; ++i) q *= p;
    if (p != 2 || e <= 2) {
      if (q == 2) continue;  // trivial group
      cycles_.push_back(cyclic_component(q));
      continue;
    }
    // 2^e, e >= 3: n = (-1)^a 5^b mod 2^e.
    UnitCycle sign{q, q - 1, 2, std::vector<std::int64_t>(static_cast<std::size_t>(q), -1)};
    UnitCycle five{q, 5, q / 4, std::vector<std::int64_t>(static_cast<std::size_t>(q), -1)};
    std::int64_t power = 1;
    for (std::int64_t b = 0; b < five.length; ++b) {
      const auto pos = static_cast<std::size_t>(power);
      const auto neg = static_cast<std::size_t>(q - power);
      sign.dlog[pos] = 0;
      five.dlog[pos] = b;
      sign.dlog[neg] = 1;
      five.dlog[neg] = b;
      power = mul_mod(power, 5, q);
    }
    cycles_.push_back(std::move(sign));
    cycles_.push_back(std::move(five));
  }
  for (const auto& c : cycles_) {
    order_ *= c.length;
    exponent_ = lcm(exponent_, c.length);
  }
  roots_.resize(static_cast<std::size_t>(exponent_));
  for (std::int64_t k = 0; k < exponent_; ++k) {
    const std::int64_t quarter = 4 * k;
    if (quarter % exponent_ == 0) {
      // Quarter turns exactly.
      static constexpr std::complex<double> kQuarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      roots_[static_cast<std::size_t>(k)] = kQuarter[(quarter / exponent_) % 4];
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(exponent_);
      roots_[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
    }
  }
}

std::complex<double> UnitGroupBasis::root_of_unity(std::int64_t k) const {
  k %= exponent_;
  if (k < 0) k += exponent_;
  return roots_[static_cast<std::size_t>(k)];
}

Character::Character(std::shared_ptr<const UnitGroupBasis> basis, std::vector<std::int64_t> exponents)
    : basis_(std::move(basis)), exponents_(std::move(exponents)) {
  const auto& cycles = basis_->cycles();
  if (exponents_.size() != cycles.size()) throw std::domain_error("Character: exponent count mismatch");
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (exponents_[i] < 0 || exponents_[i] >= cycles[i].length) {
      throw std::domain_error("Character: exponent out of range");
    }
  }
}

std::int64_t Character::phase_index(std::int64_t n) const {
  const std::int64_t D = modulus();
  std::int64_t r = n % D;
  if (r < 0) r += D;
  if (gcd(r, D) != 1 && D != 1) return -1;
  const auto& cycles = basis_->cycles();
  const std::int64_t expo = basis_->exponent();
  std::int64_t k = 0;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& c = cycles[i];
    const std::int64_t log = c.dlog[static_cast<std::size_t>(r % c.prime_power)];
    k = (k + (exponents_[i] * log % c.length) * (expo / c.length)) % expo;
  }
  return k;
}

std::ostream& operator<<(std::ostream& os, const Character& chi) {
  os << "chi_" << chi.modulus() << "(";
  for (std::size_t i = 0; i < chi.exponents().size(); ++i) os << (i ? "," : "") << chi.exponents()[i];
  return os << ")";
}

std::vector<Character> character_group(std::int64_t D) {
  auto basis = std::make_shared<const UnitGroupBasis>(D);
  const auto& cycles = basis->cycles();
  std::vector<Character> out;
  out.reserve(static_cast<std::size_t>(basis->order()));
  std::vector<std::int64_t> e(cycles.size(), 0);
  while (true) {
    out.emplace_back(basis, e);
    // Odometer increment, last component fastest: lexicographic order.
    std::size_t i = e.size();
    while (i > 0) {
      --i;
      if (++e[i] < cycles[i].length) break;
      e[i] = 0;
      if (i == 0) return out;
    }
    if (e.empty()) return out;
  }
}

std::vector<Character> non_principal_characters(std::int64_t D) {
  auto all = character_group(D);
  all.erase(all.begin());
  return all;
}

std::complex<double> evaluate(const Character& chi, std::int64_t n) {
  const std::int64_t k = chi.phase_index(n);
  if (k < 0) return {0.0, 0.0};
  return chi.basis().root_of_unity(k);
}

Character conjugate(const Character& chi) {
  const auto& cycles = chi.basis().cycles();
  std::vector<std::int64_t> e(chi.exponents());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (cycles[i].length - e[i]) % cycles[i].length;
  return {chi.basis_ptr(), std::move(e)};
}

Character product(const Character& chi, const Character& psi) {
  if (chi.modulus() != psi.modulus()) {
    throw std::domain_error("product: modulus mismatch (" + std::to_string(chi.modulus()) + " vs " +
                            std::to_string(psi.modulus()) + ")");
  }
  const auto& cycles = chi.basis().cycles();
  std::vector<std::int64_t> e(chi.exponents());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (e[i] + psi.exponents()[i]) % cycles[i].length;
  return {chi.basis_ptr(), std::move(e)};
}

std::int64_t order(const Character& chi) {
  const auto& cycles = chi.basis().cycles();
  std::int64_t m = 1;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    m = lcm(m, cycles[i].length / gcd(chi.exponents()[i], cycles[i].length));
  }
  return m;
}

bool is_principal(const Character& chi) {
  for (auto e : chi.exponents()) {
    if (e != 0) return false;
  }
  return true;
}

bool is_real(const Character& chi) { return order(chi) <= 2; }

std::int64_t conductor(const Character& chi) {
  const std::int64_t D = chi.modulus();
  for (std::int64_t d = 1; d < D; ++d) {
    if (D % d != 0) continue;
    bool induced = true;
    for (std::int64_t n = 1 + d; n <= D && induced; n += d) {
      if (gcd(n, D) == 1 && chi.phase_index(n) != 0) induced = false;
    }
    if (induced) return d;
  }
  return D;
}

bool is_primitive(const Character& chi) { return conductor(chi) == chi.modulus(); }

OrthogonalityReport verify_orthogonality(std::int64_t D) {
  const auto group = character_group(D);
  OrthogonalityReport report;
  report.modulus = D;
  report.group_size = static_cast<std::int64_t>(group.size());
  const auto phi = static_cast<double>(euler_phi(D));

  std::vector<std::vector<std::complex<double>>> values;
  values.reserve(group.size());
  for (const auto& chi : group) {
    auto& row = values.emplace_back();
    row.reserve(static_cast<std::size_t>(D));
    for (std::int64_t n = 1; n <= D; ++n) row.push_back(evaluate(chi, n));
  }
  for (std::size_t a = 0; a < group.size(); ++a) {
    for (std::size_t b = 0; b < group.size(); ++b) {
      ComplexCompensatedSum acc;
      for (std::size_t n = 0; n < values[a].size(); ++n) acc += values[a][n] * std::conj(values[b][n]);
      const double deviation = std::abs(acc.value() - std::complex<double>(a == b ? phi : 0.0, 0.0));
      if (deviation > report.max_deviation) {
        report.max_deviation = deviation;
        report.worst_row = a;
        report.worst_col = b;
      }
    }
  }
  return report;
}

}  // namespace lsieve
