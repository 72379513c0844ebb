#include "cramer/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cramer/errors.hpp"
#include "cramer/quadrature.hpp"

namespace cramer {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

void require_terms(std::uint64_t n_terms) {
  if (n_terms < 3) throw DomainError("N must be >= 3 (ln ln N undefined below e)");
}

void require_finite(double t) {
  if (!std::isfinite(t)) throw DomainError("t must be finite");
}

double density_ratio(std::uint64_t modulus) {
  return static_cast<double>(totient(modulus)) / static_cast<double>(modulus);
}

// 1 + ln ln N / ln N.
double log_correction(std::uint64_t n_terms) {
  const double l = std::log(static_cast<double>(n_terms));
  return 1.0 + std::log(l) / l;
}

// Integrates f over [a, b] in pieces that end at the zeros of cos(t v) and
// are at most max_width long, so each piece is free of sign changes.
template <class F>
double oscillatory_integral(F&& f, double a, double b, double t, double max_width) {
  const double w = std::abs(t);
  std::vector<double> cuts{a};
  double next_zero = b;
  if (w > 0.0) {
    const double period = std::numbers::pi / w;
    const double j = std::ceil(a / period - 0.5);
    next_zero = (j + 0.5) * period;
    if (next_zero <= a) next_zero += period;
  }
  double x = a;
  while (x < b) {
    double end = std::min({b, x + max_width, next_zero});
    if (end == next_zero && w > 0.0) next_zero += std::numbers::pi / w;
    cuts.push_back(end);
    x = end;
  }
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double scale = std::exp(hi) * (hi - lo) / std::max(hi, 1e-300);
    const double piece = quad::adaptive(f, lo, hi, 1e-13, 1e-16 * scale);
    const double s = sum + piece;
    comp += std::abs(sum) >= std::abs(piece) ? (sum - s) + piece : (piece - s) + sum;
    sum = s;
  }
  return sum + comp;
}

}  // namespace

std::uint64_t expected_cutoff(std::uint64_t n_terms) {
  if (n_terms < 2) return 3;
  const double n = static_cast<double>(n_terms);
  return std::max<std::uint64_t>(3, static_cast<std::uint64_t>(std::floor(n * std::log(n))));
}

std::uint64_t series_upper_limit(const PseudoPrimeState& state, std::uint64_t n_terms, PrefixRule rule) {
  if (rule == PrefixRule::NthMember) return nth_pseudoprime(state, n_terms);
  const std::uint64_t limit = expected_cutoff(n_terms);
  if (limit > state.cutoff()) {
    throw InsufficientStateError("state cutoff " + std::to_string(state.cutoff()) + " below N ln N = " +
                                 std::to_string(limit));
  }
  return limit;
}

SeriesKernel::SeriesKernel(std::optional<DirichletCharacter> chi, std::uint64_t modulus, double t)
    : chi_(std::move(chi)), modulus_(modulus), t_(t) {
  require_finite(t);
  if (modulus_ == 0) throw DomainError("modulus must be >= 1");
}

SeriesKernel SeriesKernel::character(DirichletCharacter chi, double t) {
  const auto k = chi.modulus();
  return SeriesKernel(std::move(chi), k, t);
}

SeriesKernel SeriesKernel::principal(std::uint64_t modulus, double t) { return SeriesKernel(std::nullopt, modulus, t); }

double SeriesKernel::operator()(std::uint64_t n) const {
  if (chi_) {
    if (!chi_->nonzero_at(n)) return 0.0;
    if (t_ == 0.0) return chi_->cos_theta(n);
    const double theta = 2.0 * std::numbers::pi * chi_->angle(static_cast<std::int64_t>(n))->value();
    return std::cos(theta + t_ * std::log(static_cast<double>(n)));
  }
  if (modulus_ != 1 && gcd_u64(n, modulus_) != 1) return 0.0;
  return t_ == 0.0 ? 1.0 : std::cos(t_ * std::log(static_cast<double>(n)));
}

double prefix_sum(const PseudoPrimeState& state, const SeriesKernel& kernel, std::uint64_t upper) {
  double sum = 0.0;
  state.for_each_member(upper, [&](std::uint64_t n) { sum += kernel(n); });
  return sum;
}

double general_series(const PseudoPrimeState& state, const DirichletCharacter& chi, double t, std::uint64_t n_terms,
                      PrefixRule rule) {
  require_finite(t);
  if (n_terms == 0) return 0.0;
  return prefix_sum(state, SeriesKernel::character(chi, t), series_upper_limit(state, n_terms, rule));
}

double c_series(const PseudoPrimeState& state, const DirichletCharacter& chi, std::uint64_t n_terms,
                PrefixRule rule) {
  if (chi.is_principal()) throw WrongSeriesError("C-series needs a non-principal character; use the B-series");
  if (n_terms == 0) return 0.0;
  return prefix_sum(state, SeriesKernel::character(chi), series_upper_limit(state, n_terms, rule));
}

double b_series(const PseudoPrimeState& state, double t, std::uint64_t n_terms, std::uint64_t modulus,
                PrefixRule rule) {
  require_finite(t);
  if (n_terms == 0) return 0.0;
  return prefix_sum(state, SeriesKernel::principal(modulus, t), series_upper_limit(state, n_terms, rule));
}

double clt_prefactor(std::uint64_t n_terms, double s2) {
  require_terms(n_terms);
  if (!(s2 > 0.0)) throw DomainError("s^2 must be positive");
  return std::sqrt(log_correction(n_terms) / (s2 * static_cast<double>(n_terms)));
}

double normalize_c(double raw, std::uint64_t n_terms, std::uint64_t modulus, double a_factor) {
  return clt_prefactor(n_terms, a_factor * density_ratio(modulus)) * raw;
}

double log_cos_integral(double t, double x1, double x2) {
  require_finite(t);
  if (!(x1 > 1.0) || !(x2 > 1.0)) throw DomainError("log_cos_integral needs x > 1");
  if (x1 == x2) return 0.0;
  if (x2 < x1) return -log_cos_integral(t, x2, x1);
  auto integrand = [t](double v) { return std::exp(v) * std::cos(t * v) / v; };
  return oscillatory_integral(integrand, std::log(x1), std::log(x2), t, 0.5);
}

double ei_re(double t, double x) {
  require_finite(t);
  if (!(x > 1.0)) throw DomainError("ei_re needs x > 1");
  const double upper = std::log(x);
  // Re Ei((1+it)V) = gamma + ln|1+it| + ln V + int_0^V (e^v cos(tv) - 1) / v dv.
  auto regular = [t](double v) {
    const double h = 0.5 * t * v;
    const double s = std::sin(h);
    return (std::expm1(v) * std::cos(t * v) - 2.0 * s * s) / v;
  };
  return kEulerGamma + 0.5 * std::log1p(t * t) + std::log(upper) + oscillatory_integral(regular, 0.0, upper, t, 0.5);
}

double m_N_ei(double t, std::uint64_t n_terms, std::uint64_t modulus) {
  require_terms(n_terms);
  const double n = static_cast<double>(n_terms);
  return density_ratio(modulus) * log_cos_integral(t, 3.0, n * std::log(n));
}

double m_N_approx(double t, std::uint64_t n_terms, std::uint64_t modulus) {
  require_terms(n_terms);
  require_finite(t);
  const double n = static_cast<double>(n_terms);
  return density_ratio(modulus) * (n / log_correction(n_terms)) * (t / (1.0 + t * t)) *
         std::sin(t * std::log(n * std::log(n)));
}

double s_N2_b(double t, std::uint64_t n_terms, std::uint64_t modulus, bool large_t_shortcut) {
  require_terms(n_terms);
  require_finite(t);
  const double half_density = 0.5 * density_ratio(modulus);
  const double n = static_cast<double>(n_terms);
  if (large_t_shortcut) return half_density * n / log_correction(n_terms);
  const double upper = n * std::log(n);
  return half_density * (log_cos_integral(0.0, 3.0, upper) + log_cos_integral(2.0 * t, 3.0, upper));
}

double normalize_b_with_mean(double raw, double mean, std::uint64_t n_terms, std::uint64_t modulus) {
  return clt_prefactor(n_terms, 0.5 * density_ratio(modulus)) * (raw - mean);
}

double normalize_b(double raw, double t, std::uint64_t n_terms, std::uint64_t modulus) {
  return normalize_b_with_mean(raw, m_N_ei(t, n_terms, modulus), n_terms, modulus);
}

double lyapunov_ratio(const SeriesKernel& kernel, std::uint64_t n_terms, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be > 0");
  const std::uint64_t upper = expected_cutoff(n_terms);
  double moment_sum = 0.0, variance_sum = 0.0;
  for (std::uint64_t n = 3; n <= upper; ++n) {
    const double c = std::abs(kernel(n));
    if (c == 0.0) continue;
    const double q = 1.0 / std::log(static_cast<double>(n));
    const double bern = q * (1.0 - q);
    variance_sum += bern * c * c;
    moment_sum += bern * (std::pow(1.0 - q, 1.0 + delta) + std::pow(q, 1.0 + delta)) * std::pow(c, 2.0 + delta);
  }
  if (variance_sum <= 0.0) throw DomainError("series has zero variance");
  return moment_sum / std::pow(variance_sum, 1.0 + 0.5 * delta);
}

double tail_probability(double kappa, double epsilon, std::uint64_t n_terms) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  require_terms(n_terms);
  const double scaled = kappa * std::pow(static_cast<double>(n_terms), epsilon);
  return 1.0 - std::exp(-scaled * scaled) / (std::sqrt(2.0 * std::numbers::pi) * scaled);
}

SeriesResult make_c_result(double raw, std::uint64_t n_terms, const DirichletCharacter& chi, std::uint64_t seed) {
  const double s2 = chi.a_factor().value() * density_ratio(chi.modulus());
  SeriesResult r;
  r.raw = raw;
  r.n_terms = n_terms;
  r.t = 0.0;
  r.mean = 0.0;
  r.variance = s2 * static_cast<double>(n_terms) / log_correction(n_terms);
  r.normalized = normalize_c(raw, n_terms, chi.modulus(), chi.a_factor().value());
  r.state_seed = seed;
  r.modulus = chi.modulus();
  return r;
}

SeriesResult make_b_result(double raw, double t, double mean, std::uint64_t n_terms, std::uint64_t modulus,
                           std::uint64_t seed) {
  SeriesResult r;
  r.raw = raw;
  r.n_terms = n_terms;
  r.t = t;
  r.mean = mean;
  r.variance = s_N2_b(t, n_terms, modulus, true);
  r.normalized = normalize_b_with_mean(raw, mean, n_terms, modulus);
  r.state_seed = seed;
  r.modulus = modulus;
  return r;
}

}  // namespace cramer
