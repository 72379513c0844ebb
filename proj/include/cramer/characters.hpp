#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cramer {

// Non-negative rational num/den in lowest terms.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Fraction make(std::uint64_t num, std::uint64_t den);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Sum of two turn fractions, reduced mod 1.
Fraction add_turns(Fraction a, Fraction b);
// Additive inverse mod 1 (the angle of the complex conjugate).
Fraction negate_turn(Fraction a);

std::string to_string(Fraction f);

// A table entry: the angle q in [0,1) with chi(n) = exp(2 pi i q), or nullopt
// when chi(n) = 0.
using CharacterValue = std::optional<Fraction>;

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) noexcept;

// Euler's totient. Throws DomainError for k = 0.
std::uint64_t totient(std::uint64_t k);

// A Dirichlet character mod k stored as its period table of exact angles.
// Immutable once built; construction validates zero pattern and complete
// multiplicativity.
class DirichletCharacter {
 public:
  // values[r] is chi(n) for n = r mod k (so values[0] is chi(k)).
  static DirichletCharacter from_residue_table(std::vector<CharacterValue> values);
  // values[i] is chi(i + 1) for i = 0 .. k-1, i.e. the list chi(1), ..., chi(k).
  static DirichletCharacter from_values_1_to_k(std::vector<CharacterValue> values);

  std::uint64_t modulus() const noexcept { return values_.size(); }
  bool is_principal() const noexcept { return principal_; }
  // 1 when every non-zero value is +-1, otherwise 1/2.
  Fraction a_factor() const noexcept { return real_ ? Fraction{1, 1} : Fraction{1, 2}; }
  bool is_real() const noexcept { return real_; }

  // Throw DomainError for n <= 0.
  CharacterValue angle(std::int64_t n) const;
  std::complex<double> evaluate(std::int64_t n) const;

  // cos(theta_n) with chi(n) = 0 mapped to 0; n >= 1 assumed.
  double cos_theta(std::uint64_t n) const noexcept { return cos_table_[n % modulus()]; }
  bool nonzero_at(std::uint64_t n) const noexcept { return values_[n % modulus()].has_value(); }

  std::span<const CharacterValue> residue_table() const noexcept { return values_; }
  DirichletCharacter conjugate() const;

  friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
    return a.values_ == b.values_;
  }

 private:
  friend struct CharacterFactory;
  explicit DirichletCharacter(std::vector<CharacterValue> values);

  std::vector<CharacterValue> values_;
  std::vector<double> cos_table_;
  bool principal_ = true;
  bool real_ = true;
};

// Structure of (Z/kZ)^* as a product of cyclic groups. Generators are listed
// 2-part first (-1 then 5 for 2^e with e >= 3, -1 for e = 2), then odd prime
// powers in increasing order, each with its least primitive root, every
// generator lifted to mod k by CRT.
struct UnitGroup {
  std::uint64_t modulus = 1;
  std::vector<std::uint64_t> generators;
  std::vector<std::uint64_t> orders;
  // log_table[r] holds the exponent vector of residue r (nullopt if gcd(r,k) > 1).
  std::vector<std::optional<std::vector<std::uint64_t>>> log_table;

  static UnitGroup build(std::uint64_t k);
  std::uint64_t size() const noexcept;
};

// All phi(k) characters mod k, ordered lexicographically by their exponent
// vector on the generators of UnitGroup::build(k) (first generator most
// significant). Index 0 is the principal character.
std::vector<DirichletCharacter> character_table(std::uint64_t k);

// The index-th character of character_table(k) without building the others.
DirichletCharacter character_at(std::uint64_t k, std::uint64_t index);

// The character mod 7 with values 1, e^{2 pi i/3}, e^{pi i/3}, e^{-2 pi i/3},
// e^{-pi i/3}, -1, 0 at n = 1..7.
DirichletCharacter paper_chi7();

// Named builtins: "paper-chi7", "trivial".
std::optional<DirichletCharacter> builtin_character(std::string_view name);

// Position of chi in character_table(chi.modulus()).
std::uint64_t canonical_index(const DirichletCharacter& chi);

// Text form: k whitespace/comma separated entries for chi(1), ..., chi(k);
// each entry is a turn fraction "p/q" (or "0") or "Z" for a zero value.
DirichletCharacter parse_character_values(std::string_view text);
std::string format_character_values(const DirichletCharacter& chi);

}  // namespace cramer
