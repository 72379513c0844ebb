#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cramer {

enum class StateKind { Cramer, GrosswaldSchnitzer, ActualPrimes };

std::string_view to_string(StateKind kind);
StateKind parse_state_kind(std::string_view text);

// One state of the pseudo-prime ensemble: a membership bitmap over the
// integers 0..cutoff. Bits below 3 are never set. Immutable after creation.
class PseudoPrimeState {
 public:
  // A state with exactly the given members (all in [3, cutoff]).
  static PseudoPrimeState from_members(std::span<const std::uint64_t> members, std::uint64_t cutoff,
                                       StateKind kind = StateKind::Cramer, std::uint64_t modulus = 1,
                                       std::uint64_t seed = 0);

  StateKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t modulus() const noexcept { return modulus_; }
  std::uint64_t cutoff() const noexcept { return cutoff_; }

  bool contains(std::uint64_t n) const noexcept {
    return n <= cutoff_ && ((words_[n >> 6] >> (n & 63)) & 1U) != 0;
  }
  std::uint64_t size() const noexcept;
  std::vector<std::uint64_t> members() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  // Calls f(n) for every member n <= limit in increasing order.
  template <class F>
  void for_each_member(std::uint64_t limit, F&& f) const {
    if (limit > cutoff_) limit = cutoff_;
    const std::uint64_t last_word = limit >> 6;
    for (std::uint64_t w = 0; w <= last_word; ++w) {
      std::uint64_t bits = words_[w];
      if (w == last_word && (limit & 63) != 63) bits &= (std::uint64_t{2} << (limit & 63)) - 1;
      while (bits != 0) {
        const int b = __builtin_ctzll(bits);
        f((w << 6) | static_cast<std::uint64_t>(b));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const PseudoPrimeState&, const PseudoPrimeState&) = default;

 private:
  friend class StateBuilder;
  PseudoPrimeState(StateKind kind, std::uint64_t seed, std::uint64_t modulus, std::uint64_t cutoff);

  StateKind kind_;
  std::uint64_t seed_;
  std::uint64_t modulus_;
  std::uint64_t cutoff_;
  std::vector<std::uint64_t> words_;
};

// How states are drawn. cutoff == 0 together with target_count > 0 selects
// the target-count rule (see sample_for_count).
struct EnsembleSpec {
  StateKind kind = StateKind::Cramer;
  std::uint64_t modulus = 1;
  // z_{n,k} (coprimality filter applied while sampling) instead of z_n.
  bool cramer_filtered = false;
  std::uint64_t gs_window = 0;
  std::uint64_t cutoff = 0;
  std::uint64_t target_count = 0;

  void validate() const;
};

// Cramer sampler with a precomputed table of the thresholds 1/ln n. Sharing
// one sampler across threads is safe.
class CramerSampler {
 public:
  CramerSampler(const EnsembleSpec& spec, std::uint64_t max_cutoff);

  // Bit n in [3, cutoff] is set iff uniform01(seed, n) <= 1/ln n (and, when
  // filtered, gcd(n, k) = 1).
  PseudoPrimeState sample(std::uint64_t seed, std::uint64_t cutoff) const;
  std::uint64_t max_cutoff() const noexcept { return thresholds_.empty() ? 0 : thresholds_.size() - 1; }
  const EnsembleSpec& spec() const noexcept { return spec_; }

 private:
  EnsembleSpec spec_;
  std::vector<double> thresholds_;
};

PseudoPrimeState sample_cramer(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t cutoff);

// Initial cutoff ceil(1.25 N ln N) for a state that must hold N members.
std::uint64_t initial_cutoff_for_count(std::uint64_t n_terms);

// Samples with the initial cutoff and grows it by 1.5x until the state holds
// at least n_terms members. `retries` (optional) receives the number of regrowths.
PseudoPrimeState sample_for_count(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t n_terms,
                                  int* retries = nullptr);

// Primes in [3, cutoff].
PseudoPrimeState sieve_actual(std::uint64_t cutoff);

// Smallest cutoff holding the first `count` odd primes (p_2 .. p_{count+1}).
std::uint64_t odd_prime_bound(std::uint64_t count);

struct GsSample {
  PseudoPrimeState state;
  // p'_n in index order (may repeat only where clamped).
  std::vector<std::uint64_t> values;
  std::uint64_t clamp_events = 0;
};

// Window ensemble: each actual prime p_n moves to a uniformly chosen
// p_n + j k with 0 <= j k <= window, restricted to values above p'_{n-1}.
// When no candidate lies above p'_{n-1} the largest one is taken and a clamp
// event counted.
GsSample sample_gs(const PseudoPrimeState& primes, std::uint64_t window, std::uint64_t modulus, std::uint64_t seed);

// Checks p_n <= p'_n <= p_n + window and p'_n = p_n mod k for every index.
bool satisfies_window_constraints(std::span<const std::uint64_t> primes, std::span<const std::uint64_t> values,
                                  std::uint64_t window, std::uint64_t modulus);

// Number of members <= x; requires 3 <= x <= cutoff.
std::uint64_t pi_count(const PseudoPrimeState& state, std::uint64_t x);

// sum_{n=3}^{floor x} 1 / ln n.
double expected_pi(double x);

// N-th member in increasing order (N >= 1).
std::uint64_t nth_pseudoprime(const PseudoPrimeState& state, std::uint64_t n);

// Debug dump: "kind,seed,modulus,cutoff" header line, then the bitmap words
// as 16-digit lowercase hex, one word per line.
void write_state(std::ostream& out, const PseudoPrimeState& state);
PseudoPrimeState read_state(std::istream& in);

}  // namespace cramer
