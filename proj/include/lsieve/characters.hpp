#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <ostream>
#include <vector>

namespace lsieve {

/// One cyclic factor of (Z/DZ)^*.
struct UnitCycle {
  std::int64_t prime_power;  // modulus of the CRT component this cycle lives in
  std::int64_t generator;    // generator as a residue mod prime_power
  std::int64_t length;       // cycle order
  /// Discrete log of each residue mod prime_power; -1 for non-units.
  std::vector<std::int64_t> dlog;
};

/// Generator basis of (Z/DZ)^*, one cycle per odd prime power plus the
/// (-1, 5) pair for 2^e with e >= 3. Built once per modulus and shared by
/// every character of that modulus.
class UnitGroupBasis {
 public:
  explicit UnitGroupBasis(std::int64_t modulus);

  [[nodiscard]] std::int64_t modulus() const { return modulus_; }
  [[nodiscard]] const std::vector<UnitCycle>& cycles() const { return cycles_; }
  /// Product of cycle lengths; equals phi(D).
  [[nodiscard]] std::int64_t order() const { return order_; }
  /// lcm of cycle lengths; every character value is an exponent()-th root of unity.
  [[nodiscard]] std::int64_t exponent() const { return exponent_; }
  /// Exact-where-possible exp(2 pi i k / exponent()).
  [[nodiscard]] std::complex<double> root_of_unity(std::int64_t k) const;

 private:
  std::int64_t modulus_;
  std::vector<UnitCycle> cycles_;
  std::int64_t order_ = 1;
  std::int64_t exponent_ = 1;
  std::vector<std::complex<double>> roots_;
};

/// A Dirichlet character, stored as exponents against a UnitGroupBasis:
/// chi(g_i) = exp(2 pi i e_i / n_i).
class Character {
 public:
  Character(std::shared_ptr<const UnitGroupBasis> basis, std::vector<std::int64_t> exponents);

  [[nodiscard]] std::int64_t modulus() const { return basis_->modulus(); }
  [[nodiscard]] const std::vector<std::int64_t>& exponents() const { return exponents_; }
  [[nodiscard]] const UnitGroupBasis& basis() const { return *basis_; }
  [[nodiscard]] const std::shared_ptr<const UnitGroupBasis>& basis_ptr() const { return basis_; }

  /// Phase index k with chi(n) = root_of_unity(k), or -1 when gcd(n, D) > 1.
  [[nodiscard]] std::int64_t phase_index(std::int64_t n) const;

  friend bool operator==(const Character& a, const Character& b) {
    return a.modulus() == b.modulus() && a.exponents_ == b.exponents_;
  }

 private:
  std::shared_ptr<const UnitGroupBasis> basis_;
  std::vector<std::int64_t> exponents_;
};

std::ostream& operator<<(std::ostream& os, const Character& chi);

/// All phi(D) characters mod D, principal first, then lexicographic in the
/// exponent vector.
std::vector<Character> character_group(std::int64_t D);

/// chi(n): a root of unity, or exactly 0 when gcd(n, D) > 1. Requires n >= 1.
std::complex<double> evaluate(const Character& chi, std::int64_t n);

Character conjugate(const Character& chi);
/// Pointwise product. Throws std::domain_error on modulus mismatch.
Character product(const Character& chi, const Character& psi);
std::int64_t order(const Character& chi);
bool is_principal(const Character& chi);
bool is_real(const Character& chi);

/// Smallest d | D such that chi is induced from a character mod d.
std::int64_t conductor(const Character& chi);
bool is_primitive(const Character& chi);

struct OrthogonalityReport {
  std::int64_t modulus = 1;
  std::int64_t group_size = 0;
  double max_deviation = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
};

/// Checks sum_{n=1}^{D} chi(n) conj(psi(n)) = phi(D) [chi == psi] for all pairs.
OrthogonalityReport verify_orthogonality(std::int64_t D);

/// Only the non-principal members of character_group(D).
std::vector<Character> non_principal_characters(std::int64_t D);

}  // namespace lsieve
