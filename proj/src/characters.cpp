#include "cramer/characters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "cramer/errors.hpp"

namespace cramer {

// Builds tables that are valid by construction, skipping the O(k^2) checks.
struct CharacterFactory {
  static DirichletCharacter trusted(std::vector<CharacterValue> values) { return DirichletCharacter(std::move(values)); }
};

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Inverse of a mod m for gcd(a, m) = 1.
std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (t < 0) t += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(t);
}

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  std::uint64_t value;
};

std::vector<PrimePower> factorize(std::uint64_t k) {
  std::vector<PrimePower> out;
  for (std::uint64_t p = 2; p * p <= k; ++p) {
    if (k % p != 0) continue;
    PrimePower pp{p, 0, 1};
    while (k % p == 0) {
      k /= p;
      ++pp.exponent;
      pp.value *= p;
    }
    out.push_back(pp);
  }
  if (k > 1) out.push_back({k, 1, k});
  return out;
}

std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (const auto& pp : factorize(n)) out.push_back(pp.prime);
  return out;
}

// Least g generating (Z/p^e Z)^*, p odd.
std::uint64_t least_primitive_root(const PrimePower& pp) {
  const std::uint64_t order = pp.value / pp.prime * (pp.prime - 1);
  const auto qs = distinct_prime_factors(order);
  for (std::uint64_t g = 2; g < pp.value; ++g) {
    if (g % pp.prime == 0) continue;
    bool generates = true;
    for (const auto q : qs) {
      if (powmod(g, order / q, pp.value) == 1) {
        generates = false;
        break;
      }
    }
    if (generates) return g;
  }
  throw DomainError("no primitive root found");  // unreachable for odd prime powers
}

// g mod k with g = local mod pp.value and g = 1 mod k / pp.value.
std::uint64_t crt_lift(std::uint64_t local, std::uint64_t local_mod, std::uint64_t k) {
  const std::uint64_t rest = k / local_mod;
  if (rest == 1) return local % k;
  const std::uint64_t lift = mulmod((local + local_mod - 1) % local_mod, invmod(rest % local_mod, local_mod), local_mod);
  return (1 + mulmod(rest, lift, k)) % k;
}

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / gcd_u64(a, b) * b; }

void require_modulus(std::uint64_t k) {
  if (k == 0) throw DomainError("modulus must be >= 1");
}

// Character with exponent vector b on the generators of g.
DirichletCharacter character_from_exponents(const UnitGroup& g, std::span<const std::uint64_t> b) {
  std::uint64_t exponent = 1;
  for (const auto o : g.orders) exponent = lcm_u64(exponent, o);
  std::vector<CharacterValue> values(g.modulus);
  for (std::uint64_t r = 0; r < g.modulus; ++r) {
    if (!g.log_table[r]) continue;
    const auto& logs = *g.log_table[r];
    std::uint64_t num = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      num = (num + mulmod(mulmod(logs[i], b[i], exponent), exponent / g.orders[i], exponent)) % exponent;
    }
    values[r] = Fraction::make(num, exponent);
  }
  return CharacterFactory::trusted(std::move(values));
}

std::vector<std::uint64_t> exponents_of_index(const UnitGroup& g, std::uint64_t index) {
  std::vector<std::uint64_t> b(g.orders.size());
  for (std::size_t i = g.orders.size(); i-- > 0;) {
    b[i] = index % g.orders[i];
    index /= g.orders[i];
  }
  return b;
}

}  // namespace

Fraction Fraction::make(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw DomainError("fraction with zero denominator");
  const std::uint64_t g = gcd_u64(num, den);
  return {num / g, den / g};
}

Fraction add_turns(Fraction a, Fraction b) {
  const std::uint64_t den = lcm_u64(a.den, b.den);
  const std::uint64_t num = (a.num * (den / a.den) + b.num * (den / b.den)) % den;
  return Fraction::make(num, den);
}

Fraction negate_turn(Fraction a) { return Fraction::make((a.den - a.num) % a.den, a.den); }

std::string to_string(Fraction f) {
  if (f.num == 0) return "0";
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) noexcept { return std::gcd(a, b); }

std::uint64_t totient(std::uint64_t k) {
  require_modulus(k);
  std::uint64_t result = k;
  for (const auto& pp : factorize(k)) result = result / pp.prime * (pp.prime - 1);
  return result;
}

DirichletCharacter::DirichletCharacter(std::vector<CharacterValue> values) : values_(std::move(values)) {
  cos_table_.resize(values_.size(), 0.0);
  for (std::size_t r = 0; r < values_.size(); ++r) {
    if (!values_[r]) continue;
    const Fraction q = *values_[r];
    if (q.num != 0) principal_ = false;
    if (q.num != 0 && !(q.num == 1 && q.den == 2)) real_ = false;
    // Exact values at the quarter turns keep cos(theta) = 0, +-1 exact.
    if (q.num == 0) {
      cos_table_[r] = 1.0;
    } else if (q.den == 2) {
      cos_table_[r] = -1.0;
    } else if (q.den == 4) {
      cos_table_[r] = 0.0;
    } else {
      cos_table_[r] = std::cos(2.0 * std::numbers::pi * q.value());
    }
  }
}

DirichletCharacter DirichletCharacter::from_residue_table(std::vector<CharacterValue> values) {
  const std::uint64_t k = values.size();
  require_modulus(k);
  for (std::uint64_t r = 0; r < k; ++r) {
    const bool unit = gcd_u64(r == 0 ? k : r, k) == 1;
    if (unit != values[r].has_value()) {
      throw DomainError("character value at residue " + std::to_string(r) +
                        (unit ? " must be non-zero" : " must be zero"));
    }
    if (values[r] && values[r]->num >= values[r]->den) {
      throw DomainError("character angle must lie in [0, 1)");
    }
    if (values[r]) values[r] = Fraction::make(values[r]->num, values[r]->den);
  }
  if (values[1 % k]->num != 0) throw DomainError("chi(1) must equal 1");
  for (std::uint64_t m = 1; m < k; ++m) {
    if (!values[m]) continue;
    for (std::uint64_t n = m; n < k; ++n) {
      if (!values[n]) continue;
      if (values[mulmod(m, n, k)] != add_turns(*values[m], *values[n])) {
        throw DomainError("table is not completely multiplicative at (" + std::to_string(m) + ", " +
                          std::to_string(n) + ")");
      }
    }
  }
  return DirichletCharacter(std::move(values));
}

DirichletCharacter DirichletCharacter::from_values_1_to_k(std::vector<CharacterValue> values) {
  if (values.empty()) throw DomainError("modulus must be >= 1");
  std::rotate(values.rbegin(), values.rbegin() + 1, values.rend());
  return from_residue_table(std::move(values));
}

CharacterValue DirichletCharacter::angle(std::int64_t n) const {
  if (n <= 0) throw DomainError("character argument must be >= 1");
  return values_[static_cast<std::uint64_t>(n) % modulus()];
}

std::complex<double> DirichletCharacter::evaluate(std::int64_t n) const {
  const auto q = angle(n);
  if (!q) return {0.0, 0.0};
  const std::uint64_t r = static_cast<std::uint64_t>(n) % modulus();
  if (4 % q->den == 0) {
    // 1, i, -1, -i exactly.
    static constexpr std::complex<double> quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return quarter[q->num * (4 / q->den)];
  }
  return {cos_table_[r], std::sin(2.0 * std::numbers::pi * q->value())};
}

DirichletCharacter DirichletCharacter::conjugate() const {
  std::vector<CharacterValue> values(values_);
  for (auto& v : values) {
    if (v) v = negate_turn(*v);
  }
  return DirichletCharacter(std::move(values));
}

std::uint64_t UnitGroup::size() const noexcept {
  std::uint64_t n = 1;
  for (const auto o : orders) n *= o;
  return n;
}

UnitGroup UnitGroup::build(std::uint64_t k) {
  require_modulus(k);
  UnitGroup g;
  g.modulus = k;
  for (const auto& pp : factorize(k)) {
    if (pp.prime == 2) {
      if (pp.exponent >= 2) {
        g.generators.push_back(crt_lift(pp.value - 1, pp.value, k));
        g.orders.push_back(2);
      }
      if (pp.exponent >= 3) {
        g.generators.push_back(crt_lift(5, pp.value, k));
        g.orders.push_back(pp.value / 4);
      }
    } else {
      g.generators.push_back(crt_lift(least_primitive_root(pp), pp.value, k));
      g.orders.push_back(pp.value / pp.prime * (pp.prime - 1));
    }
  }

  g.log_table.assign(k, std::nullopt);
  const std::size_t rank = g.orders.size();
  std::vector<std::uint64_t> exps(rank, 0);
  std::vector<std::uint64_t> partial(rank + 1, 1 % k);  // partial[i] = prod_{j<i} g_j^{e_j}
  for (std::uint64_t count = 0, total = g.size(); count < total; ++count) {
    for (std::size_t i = 0; i < rank; ++i) partial[i + 1] = mulmod(partial[i], powmod(g.generators[i], exps[i], k), k);
    g.log_table[partial[rank] % k] = exps;
    for (std::size_t i = rank; i-- > 0;) {
      if (++exps[i] < g.orders[i]) break;
      exps[i] = 0;
    }
  }
  return g;
}

std::vector<DirichletCharacter> character_table(std::uint64_t k) {
  const UnitGroup g = UnitGroup::build(k);
  std::vector<DirichletCharacter> out;
  const std::uint64_t count = g.size();
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(character_from_exponents(g, exponents_of_index(g, i)));
  return out;
}

DirichletCharacter character_at(std::uint64_t k, std::uint64_t index) {
  const UnitGroup g = UnitGroup::build(k);
  if (index >= g.size()) {
    throw DomainError("character index " + std::to_string(index) + " out of range for modulus " + std::to_string(k));
  }
  return character_from_exponents(g, exponents_of_index(g, index));
}

DirichletCharacter paper_chi7() {
  return DirichletCharacter::from_values_1_to_k({Fraction{0, 1}, Fraction{1, 3}, Fraction{1, 6}, Fraction{2, 3},
                                                 Fraction{5, 6}, Fraction{1, 2}, std::nullopt});
}

std::optional<DirichletCharacter> builtin_character(std::string_view name) {
  if (name == "paper-chi7") return paper_chi7();
  if (name == "trivial") return DirichletCharacter::from_values_1_to_k({Fraction{0, 1}});
  return std::nullopt;
}

std::uint64_t canonical_index(const DirichletCharacter& chi) {
  const UnitGroup g = UnitGroup::build(chi.modulus());
  // Read the exponent of each generator off chi(g_i) = e^{2 pi i b_i / ord_i}.
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < g.orders.size(); ++i) {
    const Fraction q = *chi.angle(static_cast<std::int64_t>(g.generators[i]));
    index = index * g.orders[i] + q.num * (g.orders[i] / q.den);
  }
  return index;
}

DirichletCharacter parse_character_values(std::string_view text) {
  std::vector<CharacterValue> values;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ';'; };
  while (pos < text.size()) {
    while (pos < text.size() && is_sep(text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;
    if (token == "Z" || token == "z" || token == "ZERO") {
      values.emplace_back(std::nullopt);
      continue;
    }
    std::uint64_t num = 0, den = 1;
    const auto slash = token.find('/');
    const auto parse = [&](std::string_view s, std::uint64_t& out) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("bad character table entry '" + std::string(token) + "'");
      }
    };
    if (slash == std::string_view::npos) {
      parse(token, num);
    } else {
      parse(token.substr(0, slash), num);
      parse(token.substr(slash + 1), den);
    }
    if (den == 0 || num >= den) throw ConfigError("character angle '" + std::string(token) + "' not in [0,1)");
    values.emplace_back(Fraction::make(num, den));
  }
  if (values.empty()) throw ConfigError("empty character table");
  try {
    return DirichletCharacter::from_values_1_to_k(std::move(values));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid character table: ") + e.what());
  }
}

std::string format_character_values(const DirichletCharacter& chi) {
  std::string out;
  const auto k = chi.modulus();
  for (std::uint64_t n = 1; n <= k; ++n) {
    if (n > 1) out += ' ';
    const auto q = chi.angle(static_cast<std::int64_t>(n));
    out += q ? to_string(*q) : "Z";
  }
  return out;
}

}  // namespace cramer
