#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "cramer/characters.hpp"
#include "cramer/errors.hpp"

using namespace cramer;

namespace {

std::complex<double> root(double turns) { return std::polar(1.0, 2.0 * std::numbers::pi * turns); }

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Euler's criterion: a^((p-1)/2) mod p.
int legendre(std::uint64_t a, std::uint64_t p) {
  std::uint64_t r = 1, b = a % p, e = (p - 1) / 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r == 0 ? 0 : (r == 1 ? 1 : -1);
}

}  // namespace

TEST_SUITE("characters") {
  TEST_CASE("totient against a gcd count") {
    for (std::uint64_t k = 1; k <= 200; ++k) {
      std::uint64_t count = 0;
      for (std::uint64_t a = 1; a <= k; ++a) count += std::gcd(a, k) == 1;
      CHECK(totient(k) == count);
    }
    CHECK_THROWS_AS(totient(0), DomainError);
  }

  TEST_CASE("fractions reduce and add mod 1") {
    CHECK(Fraction::make(4, 6) == Fraction{2, 3});
    CHECK(add_turns({2, 3}, {1, 2}) == Fraction{1, 6});
    CHECK(add_turns({1, 2}, {1, 2}) == Fraction{0, 1});
    CHECK(negate_turn({1, 3}) == Fraction{2, 3});
    CHECK(negate_turn({0, 1}) == Fraction{0, 1});
    CHECK(to_string(Fraction{0, 1}) == "0");
    CHECK(to_string(Fraction{5, 6}) == "5/6");
  }

  TEST_CASE("the chi7 table") {
    const auto chi = paper_chi7();
    CHECK(chi.modulus() == 7);
    CHECK_FALSE(chi.is_principal());
    CHECK_FALSE(chi.is_real());
    CHECK(chi.a_factor() == Fraction{1, 2});
    CHECK(chi.angle(1) == CharacterValue(Fraction{0, 1}));
    CHECK(chi.angle(2) == CharacterValue(Fraction{1, 3}));
    CHECK(chi.angle(3) == CharacterValue(Fraction{1, 6}));
    CHECK(chi.angle(4) == CharacterValue(Fraction{2, 3}));
    CHECK(chi.angle(5) == CharacterValue(Fraction{5, 6}));
    CHECK(chi.angle(6) == CharacterValue(Fraction{1, 2}));
    CHECK_FALSE(chi.angle(7).has_value());
    CHECK(chi.angle(10) == chi.angle(3));
    // 3 is the least primitive root mod 7, so chi7 is chi(3) = e^{2 pi i / 6}: index 1.
    CHECK(character_at(7, 1) == chi);
    CHECK(canonical_index(chi) == 1);
    CHECK(builtin_character("paper-chi7") == chi);
    CHECK_FALSE(builtin_character("nope").has_value());
  }

  TEST_CASE("characters mod 7 agree with powers of the primitive root 3") {
    const auto table = character_table(7);
    REQUIRE(table.size() == 6);
    for (std::uint64_t j = 0; j < 6; ++j) {
      std::uint64_t g = 1;
      for (std::uint64_t m = 0; m < 6; ++m) {
        CHECK(table[j].angle(static_cast<std::int64_t>(g)) == CharacterValue(Fraction::make(j * m % 6, 6)));
        g = g * 3 % 7;
      }
    }
  }

  TEST_CASE("the character mod 4") {
    const auto chi4 = character_at(4, 1);
    CHECK(chi4.is_real());
    CHECK(chi4.a_factor() == Fraction{1, 1});
    CHECK(chi4.evaluate(1) == std::complex<double>(1, 0));
    CHECK(chi4.evaluate(2) == std::complex<double>(0, 0));
    CHECK(chi4.evaluate(3) == std::complex<double>(-1, 0));
    CHECK(chi4.evaluate(5) == std::complex<double>(1, 0));
  }

  TEST_CASE("quadratic characters match the Legendre symbol") {
    for (std::uint64_t p = 3; p < 60; ++p) {
      if (!is_prime(p)) continue;
      int real_nonprincipal = 0;
      for (const auto& chi : character_table(p)) {
        if (!chi.is_real() || chi.is_principal()) continue;
        ++real_nonprincipal;
        for (std::uint64_t a = 1; a < p; ++a) {
          CHECK(chi.evaluate(static_cast<std::int64_t>(a)).real() == doctest::Approx(legendre(a, p)));
        }
      }
      CHECK(real_nonprincipal == 1);
    }
  }

  TEST_CASE("orthogonality over the character group") {
    for (std::uint64_t k : {1, 2, 8, 9, 12, 15, 16, 24, 35, 48}) {
      const auto table = character_table(k);
      REQUIRE(table.size() == totient(k));
      for (std::uint64_t a = 1; a <= k; ++a) {
        for (std::uint64_t b = 1; b <= k; ++b) {
          std::complex<double> s = 0;
          for (const auto& chi : table) {
            s += chi.evaluate(static_cast<std::int64_t>(a)) * std::conj(chi.evaluate(static_cast<std::int64_t>(b)));
          }
          const double expected = (a == b && std::gcd(a, k) == 1) ? static_cast<double>(totient(k)) : 0.0;
          CHECK(std::abs(s - expected) < 1e-9);
        }
      }
      // Distinct characters.
      for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = i + 1; j < table.size(); ++j) CHECK_FALSE(table[i] == table[j]);
    }
  }

  TEST_CASE("every character mod k <= 50 is a character") {
    for (std::uint64_t k = 1; k <= 50; ++k) {
      const auto table = character_table(k);
      CHECK(table.size() == totient(k));
      CHECK(table.front().is_principal());
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        const auto& chi = table[idx];
        CHECK(canonical_index(chi) == idx);
        std::complex<double> sum = 0;
        for (std::uint64_t a = 1; a <= k; ++a) {
          const auto va = chi.angle(static_cast<std::int64_t>(a));
          CHECK(va.has_value() == (std::gcd(a, k) == 1));
          if (va) sum += root(va->value());
          for (std::uint64_t b = 1; b <= k; ++b) {
            const auto vb = chi.angle(static_cast<std::int64_t>(b));
            const auto vab = chi.angle(static_cast<std::int64_t>(a * b));
            if (va && vb) {
              CHECK(vab == CharacterValue(add_turns(*va, *vb)));
            } else {
              CHECK_FALSE(vab.has_value());
            }
          }
        }
        CHECK(std::abs(sum - (chi.is_principal() ? static_cast<double>(totient(k)) : 0.0)) < 1e-9);
        CHECK(chi.conjugate().conjugate() == chi);
        CHECK(chi.is_real() == (chi.conjugate() == chi));
      }
    }
  }

  TEST_CASE("character_at agrees with the full table") {
    for (std::uint64_t k : {20, 21, 32, 45}) {
      const auto table = character_table(k);
      for (std::uint64_t i = 0; i < table.size(); ++i) CHECK(character_at(k, i) == table[i]);
    }
  }

  TEST_CASE("cos_theta and evaluate agree") {
    const auto chi = character_at(13, 5);
    for (std::uint64_t n = 1; n < 40; ++n) {
      CHECK(chi.cos_theta(n) == doctest::Approx(chi.evaluate(static_cast<std::int64_t>(n)).real()).epsilon(1e-14));
      CHECK(chi.nonzero_at(n) == (n % 13 != 0));
    }
  }

  TEST_CASE("evaluation outside n >= 1 throws") {
    const auto chi = paper_chi7();
    CHECK_THROWS_AS(chi.angle(0), DomainError);
    CHECK_THROWS_AS(chi.angle(-3), DomainError);
  }

  TEST_CASE("residue tables are validated") {
    // Not multiplicative: chi(2)^2 != chi(4).
    CHECK_THROWS(DirichletCharacter::from_values_1_to_k(
        {Fraction{0, 1}, Fraction{1, 3}, Fraction{1, 6}, Fraction{1, 3}, Fraction{5, 6}, Fraction{1, 2}, std::nullopt}));
    // Zero where gcd(n, k) = 1.
    CHECK_THROWS(DirichletCharacter::from_values_1_to_k({Fraction{0, 1}, std::nullopt, std::nullopt}));
    // chi(1) != 1.
    CHECK_THROWS(DirichletCharacter::from_values_1_to_k({Fraction{1, 2}, std::nullopt}));
    CHECK_NOTHROW(DirichletCharacter::from_values_1_to_k({Fraction{0, 1}, std::nullopt, Fraction{1, 2}, std::nullopt}));
  }

  TEST_CASE("parse and format round trip") {
    const auto chi = parse_character_values("0, 1/3, 1/6, 2/3, 5/6, 1/2, ZERO");
    CHECK(chi == paper_chi7());
    CHECK(format_character_values(chi) == "0 1/3 1/6 2/3 5/6 1/2 Z");
    CHECK(parse_character_values(format_character_values(character_at(15, 3))) == character_at(15, 3));
    CHECK(parse_character_values("0;z\n1/2\tz") == character_at(4, 1));
    CHECK_THROWS_AS(parse_character_values("0, 3/2, Z"), ConfigError);
    CHECK_THROWS_AS(parse_character_values("0, 1/0"), ConfigError);
    CHECK_THROWS_AS(parse_character_values("0, abc"), ConfigError);
    CHECK_THROWS_AS(parse_character_values(""), ConfigError);
  }

  TEST_CASE("modulus one") {
    const auto table = character_table(1);
    REQUIRE(table.size() == 1);
    CHECK(table[0].is_principal());
    CHECK(table[0].angle(5) == CharacterValue(Fraction{0, 1}));
    CHECK(builtin_character("trivial") == table[0]);
  }
}
