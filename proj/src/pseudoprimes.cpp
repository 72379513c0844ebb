#include "cramer/pseudoprimes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "cramer/characters.hpp"
#include "cramer/errors.hpp"
#include "cramer/rng.hpp"

namespace cramer {

class StateBuilder {
 public:
  StateBuilder(StateKind kind, std::uint64_t seed, std::uint64_t modulus, std::uint64_t cutoff)
      : state_(kind, seed, modulus, cutoff) {}

  void set(std::uint64_t n) { state_.words_[n >> 6] |= std::uint64_t{1} << (n & 63); }
  void clear(std::uint64_t n) { state_.words_[n >> 6] &= ~(std::uint64_t{1} << (n & 63)); }
  std::vector<std::uint64_t>& words() { return state_.words_; }
  PseudoPrimeState finish() && { return std::move(state_); }

 private:
  PseudoPrimeState state_;
};

namespace {

constexpr std::uint64_t kMinMember = 3;

void require_cutoff(std::uint64_t cutoff) {
  if (cutoff < kMinMember) throw DomainError("cutoff must be >= 3");
}

}  // namespace

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::Cramer:
      return "CRAMER";
    case StateKind::GrosswaldSchnitzer:
      return "GROSSWALD_SCHNITZER";
    case StateKind::ActualPrimes:
      return "ACTUAL_PRIMES";
  }
  return "?";
}

StateKind parse_state_kind(std::string_view text) {
  if (text == "CRAMER") return StateKind::Cramer;
  if (text == "GROSSWALD_SCHNITZER") return StateKind::GrosswaldSchnitzer;
  if (text == "ACTUAL_PRIMES") return StateKind::ActualPrimes;
  throw ConfigError("unknown state kind '" + std::string(text) + "'");
}

PseudoPrimeState::PseudoPrimeState(StateKind kind, std::uint64_t seed, std::uint64_t modulus, std::uint64_t cutoff)
    : kind_(kind), seed_(seed), modulus_(modulus), cutoff_(cutoff), words_((cutoff >> 6) + 1, 0) {}

PseudoPrimeState PseudoPrimeState::from_members(std::span<const std::uint64_t> members, std::uint64_t cutoff,
                                                StateKind kind, std::uint64_t modulus, std::uint64_t seed) {
  require_cutoff(cutoff);
  StateBuilder b(kind, seed, modulus, cutoff);
  for (const auto n : members) {
    if (n < kMinMember || n > cutoff) throw DomainError("member " + std::to_string(n) + " outside [3, cutoff]");
    b.set(n);
  }
  return std::move(b).finish();
}

std::uint64_t PseudoPrimeState::size() const noexcept {
  std::uint64_t count = 0;
  for (const auto w : words_) count += static_cast<std::uint64_t>(std::popcount(w));
  return count;
}

std::vector<std::uint64_t> PseudoPrimeState::members() const {
  std::vector<std::uint64_t> out;
  out.reserve(size());
  for_each_member(cutoff_, [&](std::uint64_t n) { out.push_back(n); });
  return out;
}

void EnsembleSpec::validate() const {
  if (modulus == 0) throw ConfigError("modulus must be >= 1");
  if (kind == StateKind::ActualPrimes) throw ConfigError("actual primes are not an ensemble");
  if (cutoff != 0 && cutoff < kMinMember) throw ConfigError("cutoff must be >= 3");
}

CramerSampler::CramerSampler(const EnsembleSpec& spec, std::uint64_t max_cutoff) : spec_(spec) {
  spec_.validate();
  require_cutoff(max_cutoff);
  thresholds_.assign(max_cutoff + 1, -1.0);
  for (std::uint64_t n = kMinMember; n <= max_cutoff; ++n) {
    if (spec_.cramer_filtered && gcd_u64(n, spec_.modulus) != 1) continue;
    thresholds_[n] = 1.0 / std::log(static_cast<double>(n));
  }
}

PseudoPrimeState CramerSampler::sample(std::uint64_t seed, std::uint64_t cutoff) const {
  require_cutoff(cutoff);
  if (cutoff > max_cutoff()) throw DomainError("cutoff exceeds the sampler's threshold table");
  StateBuilder b(StateKind::Cramer, seed, spec_.modulus, cutoff);
  auto& words = b.words();
  const double* q = thresholds_.data();
  for (std::uint64_t n = kMinMember; n <= cutoff; ++n) {
    if (uniform01(seed, n) <= q[n]) words[n >> 6] |= std::uint64_t{1} << (n & 63);
  }
  return std::move(b).finish();
}

PseudoPrimeState sample_cramer(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t cutoff) {
  require_cutoff(cutoff);
  return CramerSampler(spec, cutoff).sample(seed, cutoff);
}

std::uint64_t initial_cutoff_for_count(std::uint64_t n_terms) {
  const double n = static_cast<double>(std::max<std::uint64_t>(n_terms, 2));
  return std::max<std::uint64_t>(kMinMember, static_cast<std::uint64_t>(std::ceil(1.25 * n * std::log(n))));
}

PseudoPrimeState sample_for_count(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t n_terms,
                                  int* retries) {
  std::uint64_t cutoff = initial_cutoff_for_count(n_terms);
  int grown = 0;
  for (;;) {
    auto state = sample_cramer(spec, seed, cutoff);
    if (state.size() >= n_terms) {
      if (retries) *retries = grown;
      return state;
    }
    cutoff = static_cast<std::uint64_t>(std::ceil(1.5 * static_cast<double>(cutoff)));
    ++grown;
  }
}

PseudoPrimeState sieve_actual(std::uint64_t cutoff) {
  require_cutoff(cutoff);
  StateBuilder b(StateKind::ActualPrimes, 0, 1, cutoff);
  auto& words = b.words();
  // Start with every odd n >= 3 and cross out odd composites.
  std::fill(words.begin(), words.end(), 0xAAAAAAAAAAAAAAAAULL);
  words[0] &= ~std::uint64_t{0x2};  // 1
  const std::uint64_t tail = cutoff & 63;
  if (tail != 63) words.back() &= (std::uint64_t{2} << tail) - 1;
  for (std::uint64_t p = 3; p * p <= cutoff; p += 2) {
    if (((words[p >> 6] >> (p & 63)) & 1U) == 0) continue;
    for (std::uint64_t m = p * p; m <= cutoff; m += 2 * p) words[m >> 6] &= ~(std::uint64_t{1} << (m & 63));
  }
  return std::move(b).finish();
}

std::uint64_t odd_prime_bound(std::uint64_t count) {
  if (count == 0) return kMinMember;
  // p_m < m (ln m + ln ln m) for m >= 6.
  const double m = static_cast<double>(std::max<std::uint64_t>(count + 1, 6));
  return static_cast<std::uint64_t>(m * (std::log(m) + std::log(std::log(m)))) + 1;
}

GsSample sample_gs(const PseudoPrimeState& primes, std::uint64_t window, std::uint64_t modulus, std::uint64_t seed) {
  if (modulus == 0) throw DomainError("modulus must be >= 1");
  const auto ps = primes.members();
  std::vector<std::uint64_t> values;
  std::uint64_t clamps = 0;
  values.reserve(ps.size());
  const std::uint64_t steps = window / modulus;  // candidates p + j k, j = 0..steps
  std::uint64_t previous = 0;
  StateBuilder b(StateKind::GrosswaldSchnitzer, seed, modulus, primes.cutoff() + window);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::uint64_t p = ps[i];
    // Smallest j with p + j k > previous.
    std::uint64_t j_min = 0;
    if (previous >= p) j_min = (previous - p) / modulus + 1;
    std::uint64_t chosen;
    if (j_min > steps) {
      chosen = p + steps * modulus;
      ++clamps;
    } else {
      const std::uint64_t options = steps - j_min + 1;
      const auto pick = static_cast<std::uint64_t>(uniform01(seed, i) * static_cast<double>(options));
      chosen = p + (j_min + std::min(pick, options - 1)) * modulus;
    }
    values.push_back(chosen);
    b.set(chosen);
    previous = std::max(previous, chosen);
  }
  return GsSample{std::move(b).finish(), std::move(values), clamps};
}

bool satisfies_window_constraints(std::span<const std::uint64_t> primes, std::span<const std::uint64_t> values,
                                  std::uint64_t window, std::uint64_t modulus) {
  if (primes.size() != values.size() || modulus == 0) return false;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (values[i] < primes[i] || values[i] > primes[i] + window) return false;
    if (values[i] % modulus != primes[i] % modulus) return false;
  }
  return true;
}

std::uint64_t pi_count(const PseudoPrimeState& state, std::uint64_t x) {
  if (x < kMinMember) throw DomainError("pi_count needs x >= 3");
  if (x > state.cutoff()) throw DomainError("pi_count: x exceeds the state's cutoff");
  const auto words = state.words();
  std::uint64_t count = 0;
  const std::uint64_t last = x >> 6;
  for (std::uint64_t w = 0; w < last; ++w) count += static_cast<std::uint64_t>(std::popcount(words[w]));
  const std::uint64_t mask = (x & 63) == 63 ? ~std::uint64_t{0} : (std::uint64_t{2} << (x & 63)) - 1;
  return count + static_cast<std::uint64_t>(std::popcount(words[last] & mask));
}

double expected_pi(double x) {
  if (!(x >= 3.0)) throw DomainError("expected_pi needs x >= 3");
  const auto upper = static_cast<std::uint64_t>(std::floor(x));
  // Neumaier summation.
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t n = kMinMember; n <= upper; ++n) {
    const double term = 1.0 / std::log(static_cast<double>(n));
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::uint64_t nth_pseudoprime(const PseudoPrimeState& state, std::uint64_t n) {
  if (n == 0) throw DomainError("nth_pseudoprime needs N >= 1");
  const auto words = state.words();
  std::uint64_t remaining = n;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto c = static_cast<std::uint64_t>(std::popcount(words[w]));
    if (c < remaining) {
      remaining -= c;
      continue;
    }
    std::uint64_t bits = words[w];
    for (std::uint64_t i = 1; i < remaining; ++i) bits &= bits - 1;
    return (static_cast<std::uint64_t>(w) << 6) | static_cast<std::uint64_t>(__builtin_ctzll(bits));
  }
  throw InsufficientStateError("state holds " + std::to_string(n - remaining) + " members, " +
                               std::to_string(n) + " requested");
}

void write_state(std::ostream& out, const PseudoPrimeState& state) {
  out << to_string(state.kind()) << ',' << state.seed() << ',' << state.modulus() << ',' << state.cutoff() << '\n';
  const auto flags = out.flags();
  const auto fill = out.fill('0');
  for (const auto w : state.words()) out << std::hex << std::setw(16) << w << '\n';
  out.fill(fill);
  out.flags(flags);
}

PseudoPrimeState read_state(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("state dump: missing header");
  std::istringstream hs(header);
  std::string kind, seed, modulus, cutoff;
  if (!std::getline(hs, kind, ',') || !std::getline(hs, seed, ',') || !std::getline(hs, modulus, ',') ||
      !std::getline(hs, cutoff)) {
    throw ConfigError("state dump: malformed header '" + header + "'");
  }
  const std::uint64_t x = std::stoull(cutoff);
  require_cutoff(x);
  StateBuilder b(parse_state_kind(kind), std::stoull(seed), std::stoull(modulus), x);
  auto& words = b.words();
  std::string line;
  for (auto& w : words) {
    if (!std::getline(in, line)) throw ConfigError("state dump: truncated bitmap");
    w = std::stoull(line, nullptr, 16);
  }
  if ((words[0] & 0x7U) != 0) throw ConfigError("state dump: members below 3");
  return std::move(b).finish();
}

}  // namespace cramer
