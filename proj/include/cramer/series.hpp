#pragma once

#include <cstdint>
#include <optional>

#include "cramer/characters.hpp"
#include "cramer/pseudoprimes.hpp"

namespace cramer {

// Which integer ends the summation for an N-term series over a state.
//   NthMember      - p'_N, the N-th member of the state (the literal
//                    definition; always used for the actual primes).
//   ExpectedCutoff - floor(N ln N), the value p'_N is replaced by in the
//                    variance and mean formulas.
enum class PrefixRule { NthMember, ExpectedCutoff };

// max(3, floor(N ln N)).
std::uint64_t expected_cutoff(std::uint64_t n_terms);

// Last integer summed over for an N-term series (N >= 1).
std::uint64_t series_upper_limit(const PseudoPrimeState& state, std::uint64_t n_terms, PrefixRule rule);

// Coefficient c_n multiplying z_n in a series: cos(theta_n + t ln n) for a
// character (zero where chi(n) = 0), or cos(t ln n) restricted to
// gcd(n, k) = 1 for the principal-character form.
class SeriesKernel {
 public:
  static SeriesKernel character(DirichletCharacter chi, double t = 0.0);
  static SeriesKernel principal(std::uint64_t modulus, double t);

  double operator()(std::uint64_t n) const;
  std::uint64_t modulus() const noexcept { return modulus_; }
  double t() const noexcept { return t_; }
  const std::optional<DirichletCharacter>& chi() const noexcept { return chi_; }

 private:
  SeriesKernel(std::optional<DirichletCharacter> chi, std::uint64_t modulus, double t);

  std::optional<DirichletCharacter> chi_;
  std::uint64_t modulus_;
  double t_;
};

// sum over members n <= upper of kernel(n).
double prefix_sum(const PseudoPrimeState& state, const SeriesKernel& kernel, std::uint64_t upper);

// sum_{n=3}^{p'_N} z_n cos(theta_n + t ln n).
double general_series(const PseudoPrimeState& state, const DirichletCharacter& chi, double t, std::uint64_t n_terms,
                      PrefixRule rule = PrefixRule::NthMember);

// sum_{n=3}^{p'_N} z_{n,k} cos(theta_n); chi must be non-principal.
double c_series(const PseudoPrimeState& state, const DirichletCharacter& chi, std::uint64_t n_terms,
                PrefixRule rule = PrefixRule::NthMember);

// sum_{n=3}^{p'_N} z_{n,k} cos(t ln n).
double b_series(const PseudoPrimeState& state, double t, std::uint64_t n_terms, std::uint64_t modulus,
                PrefixRule rule = PrefixRule::NthMember);

// sqrt((1 + ln ln N / ln N) / (s2 N)).
double clt_prefactor(std::uint64_t n_terms, double s2);

// Normalized C-statistic with s^2 = a phi(k) / k and zero mean.
double normalize_c(double raw, std::uint64_t n_terms, std::uint64_t modulus, double a_factor);

// Re Ei((1 + i t) ln x) for x > 1.
double ei_re(double t, double x);

// integral_{x1}^{x2} cos(t ln u) / ln u du for 1 < x1, x2.
double log_cos_integral(double t, double x1, double x2);

// (phi(k)/k) * integral_3^{N ln N} cos(t ln u) / ln u du.
double m_N_ei(double t, std::uint64_t n_terms, std::uint64_t modulus);

// (phi(k)/k) * N / (1 + ln ln N / ln N) * t / (1 + t^2) * sin(t ln(N ln N)).
double m_N_approx(double t, std::uint64_t n_terms, std::uint64_t modulus);

// (phi(k) / 2k) * [Li-part + Ei-part] with both parts integrated from 3 to
// N ln N; with large_t_shortcut, (phi(k) / 2k) * N / (1 + ln ln N / ln N).
double s_N2_b(double t, std::uint64_t n_terms, std::uint64_t modulus, bool large_t_shortcut = false);

// Normalized B-statistic centred on m_N_ei with s^2 = phi(k) / 2k.
double normalize_b(double raw, double t, std::uint64_t n_terms, std::uint64_t modulus);
// Same with a precomputed mean.
double normalize_b_with_mean(double raw, double mean, std::uint64_t n_terms, std::uint64_t modulus);

// Lyapunov ratio s_N^{-(2+delta)} sum_n E|x_n - mu_n|^{2+delta} for
// x_n = z_n c_n, z_n ~ Bernoulli(1/ln n), n = 3..max(3, floor(N ln N)).
double lyapunov_ratio(const SeriesKernel& kernel, std::uint64_t n_terms, double delta);

// 1 - exp(-kappa^2 N^{2 eps}) / (sqrt(2 pi) kappa N^eps).
double tail_probability(double kappa, double epsilon, std::uint64_t n_terms);

struct SeriesResult {
  double raw = 0.0;
  std::uint64_t n_terms = 0;
  double t = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double normalized = 0.0;
  std::uint64_t state_seed = 0;
  std::uint64_t modulus = 1;
};

// C-series result: mean 0, variance s^2 N / (1 + ln ln N / ln N).
SeriesResult make_c_result(double raw, std::uint64_t n_terms, const DirichletCharacter& chi, std::uint64_t seed);
// B-series result with the given mean and the large-t variance.
SeriesResult make_b_result(double raw, double t, double mean, std::uint64_t n_terms, std::uint64_t modulus,
                           std::uint64_t seed);

}  // namespace cramer
