#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lsieve/characters.hpp"
#include "lsieve/number_core.hpp"
#include "lsieve/random.hpp"

using namespace lsieve;
using cd = std::complex<double>;

namespace {

bool close(cd a, cd b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

std::vector<cd> value_vector(const Character& chi) {
  std::vector<cd> out;
  for (std::int64_t n = 1; n <= chi.modulus(); ++n) out.push_back(evaluate(chi, n));
  return out;
}

int mobius(std::int64_t n) {
  int mu = 1;
  for (auto [p, e] : factorize(n).pairs) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

}  // namespace

TEST_CASE("character_group D=1 is the constant 1") {
  const auto group = character_group(1);
  REQUIRE(group.size() == 1);
  for (std::int64_t n = 1; n <= 50; ++n) CHECK(evaluate(group[0], n) == cd(1.0, 0.0));
  CHECK(is_principal(group[0]));
}

TEST_CASE("character_group D=4") {
  const auto group = character_group(4);
  REQUIRE(group.size() == 2);
  CHECK(is_principal(group[0]));
  // A completely multiplicative period-4 function vanishing on evens is fixed by
  // its value at 3, which must square to chi(9) = chi(1) = 1.
  CHECK(evaluate(group[1], 3) == cd(-1.0, 0.0));
  CHECK(evaluate(group[1], 1) == cd(1.0, 0.0));
  CHECK(evaluate(group[1], 2) == cd(0.0, 0.0));
}

TEST_CASE("character_group D=5 via the discrete log table for generator 2") {
  const auto group = character_group(5);
  REQUIRE(group.size() == 4);
  // 2^1 = 2, 2^2 = 4, 2^3 = 3 (mod 5).
  const std::int64_t dlog[5] = {-1, 0, 1, 3, 2};
  const Character* order_four = nullptr;
  for (const auto& chi : group) {
    if (close(evaluate(chi, 2), cd(0.0, 1.0))) order_four = &chi;
  }
  REQUIRE(order_four != nullptr);
  CHECK(close(evaluate(*order_four, 3), cd(0.0, -1.0)));
  CHECK(close(evaluate(*order_four, 4), cd(-1.0, 0.0)));
  for (const auto& chi : group) {
    const cd at_two = evaluate(chi, 2);
    for (std::int64_t n = 1; n < 5; ++n) {
      CHECK(close(evaluate(chi, n), std::pow(at_two, static_cast<int>(dlog[n]))));
    }
  }
}

TEST_CASE("evaluate examples") {
  const auto six = character_group(6);
  CHECK(evaluate(six[0], 5) == cd(1.0, 0.0));
  for (const auto& chi : six) CHECK(evaluate(chi, 3) == cd(0.0, 0.0));

  const auto five = character_group(5);
  const Character* quadratic = nullptr;
  for (const auto& chi : five) {
    if (order(chi) == 2) quadratic = &chi;
  }
  REQUIRE(quadratic != nullptr);
  // Squares mod 5 are {1, 4}; 2 is a non-residue.
  std::set<std::int64_t> squares;
  for (std::int64_t k = 1; k < 5; ++k) squares.insert(k * k % 5);
  for (std::int64_t n = 1; n < 5; ++n) {
    CHECK(evaluate(*quadratic, n) == cd(squares.count(n) ? 1.0 : -1.0, 0.0));
  }
  CHECK(evaluate(*quadratic, 2) == cd(-1.0, 0.0));
}

TEST_CASE("group operations") {
  const auto group = character_group(15);
  for (const auto& chi : group) {
    CHECK(is_principal(product(chi, conjugate(chi))));
    for (std::int64_t n = 1; n <= 30; ++n) {
      CHECK(close(evaluate(conjugate(chi), n), std::conj(evaluate(chi, n))));
      CHECK(close(evaluate(product(chi, group[3]), n), evaluate(chi, n) * evaluate(group[3], n)));
    }
    // order = least m with chi^m principal
    Character power = chi;
    std::int64_t m = 1;
    while (!is_principal(power)) {
      power = product(power, chi);
      ++m;
    }
    CHECK(order(chi) == m);
  }
  CHECK(is_principal(conjugate(group[0])));
  const auto five = character_group(5);
  CHECK(order(five[2]) == 2);
  CHECK_THROWS_AS(product(five[1], group[1]), std::domain_error);
}

TEST_CASE("verify_orthogonality") {
  CHECK(verify_orthogonality(1).max_deviation == 0.0);
  const auto twelve = verify_orthogonality(12);
  CHECK(twelve.group_size == 4);
  CHECK(twelve.max_deviation < 1e-9);

  const auto five = character_group(5);
  cd inner = 0.0;
  for (std::int64_t n = 1; n <= 5; ++n) inner += evaluate(five[0], n) * std::conj(evaluate(five[2], n));
  CHECK(std::abs(inner) < 1e-15);
}

TEST_CASE("character_group has phi(D) distinct members, principal first") {
  for (std::int64_t D = 1; D <= 200; ++D) {
    const auto group = character_group(D);
    REQUIRE(static_cast<std::int64_t>(group.size()) == euler_phi(D));
    REQUIRE(is_principal(group.front()));
    std::set<std::vector<std::int64_t>> exponents;
    for (std::size_t i = 0; i < group.size(); ++i) {
      exponents.insert(group[i].exponents());
      if (i > 0) REQUIRE(group[i - 1].exponents() < group[i].exponents());
    }
    REQUIRE(exponents.size() == group.size());
  }
}

TEST_CASE("distinct characters have distinct value vectors and non-principal quotients") {
  for (std::int64_t D : {8, 16, 24, 45, 63, 100, 105}) {
    const auto group = character_group(D);
    std::vector<std::vector<cd>> values;
    for (const auto& chi : group) values.push_back(value_vector(chi));
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = 0; b < group.size(); ++b) {
        if (a == b) continue;
        REQUIRE(!is_principal(product(group[a], conjugate(group[b]))));
        double diff = 0.0;
        for (std::size_t n = 0; n < values[a].size(); ++n) diff = std::max(diff, std::abs(values[a][n] - values[b][n]));
        REQUIRE(diff > 0.5);
      }
    }
  }
}

TEST_CASE("evaluate is periodic and completely multiplicative") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto D = static_cast<std::int64_t>(rng.next() % 300) + 1;
    const auto group = character_group(D);
    const Character& chi = group[rng.next() % group.size()];
    const auto m = static_cast<std::int64_t>(rng.next() % 10'000) + 1;
    const auto n = static_cast<std::int64_t>(rng.next() % 10'000) + 1;
    REQUIRE(close(evaluate(chi, m * n), evaluate(chi, m) * evaluate(chi, n), 1e-11));
    REQUIRE(evaluate(chi, m + D) == evaluate(chi, m));
    const cd v = evaluate(chi, n);
    if (std::gcd(n, D) == 1) {
      REQUIRE(std::abs(std::abs(v) - 1.0) < 1e-14);
      REQUIRE(close(std::pow(v, static_cast<int>(chi.basis().exponent())), cd(1.0, 0.0), 1e-10));
    } else {
      REQUIRE(v == cd(0.0, 0.0));
    }
  }
}

TEST_CASE("basis bookkeeping for 2^e") {
  const UnitGroupBasis basis(32);
  REQUIRE(basis.cycles().size() == 2);
  CHECK(basis.cycles()[0].generator == 31);
  CHECK(basis.cycles()[0].length == 2);
  CHECK(basis.cycles()[1].generator == 5);
  CHECK(basis.cycles()[1].length == 8);
  CHECK(basis.order() == 16);

  const UnitGroupBasis mixed(360);  // 8 * 9 * 5
  std::int64_t product_of_lengths = 1;
  for (const auto& c : mixed.cycles()) product_of_lengths *= c.length;
  CHECK(product_of_lengths == euler_phi(360));
}

TEST_CASE("conductor: primitive counts follow the Mobius formula") {
  for (std::int64_t D = 1; D <= 120; ++D) {
    std::int64_t expected = 0;
    for (std::int64_t d = 1; d <= D; ++d) {
      if (D % d == 0) expected += mobius(d) * euler_phi(D / d);
    }
    std::int64_t primitive = 0;
    for (const auto& chi : character_group(D)) {
      const std::int64_t f = conductor(chi);
      REQUIRE(D % f == 0);
      primitive += is_primitive(chi) ? 1 : 0;
    }
    REQUIRE(primitive == expected);
  }
  CHECK(conductor(character_group(4)[1]) == 4);
  CHECK(conductor(character_group(12)[0]) == 1);
}
