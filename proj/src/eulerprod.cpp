#include "cramer/eulerprod.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "cramer/errors.hpp"

namespace cramer {
namespace {

constexpr int kBernoulliTerms = 15;

// B_{2j} / (2j)! for j = 1..kBernoulliTerms, from B_{2j}/(2j)! = (-1)^{j+1} 2 zeta(2j) / (2 pi)^{2j}.
const std::array<double, kBernoulliTerms + 1>& bernoulli_over_factorial() {
  static const auto table = [] {
    std::array<double, kBernoulliTerms + 1> c{};
    const double two_pi = 2.0 * std::numbers::pi;
    for (int j = 1; j <= kBernoulliTerms; ++j) {
      double zeta_2j;
      if (j == 1) {
        zeta_2j = std::numbers::pi * std::numbers::pi / 6.0;
      } else if (j == 2) {
        zeta_2j = std::pow(std::numbers::pi, 4) / 90.0;
      } else {
        zeta_2j = 0.0;
        for (int n = 2000; n >= 1; --n) zeta_2j += std::pow(static_cast<double>(n), -2.0 * j);
      }
      const double sign = (j % 2 == 1) ? 1.0 : -1.0;
      c[static_cast<std::size_t>(j)] = sign * 2.0 * zeta_2j / std::pow(two_pi, 2 * j);
    }
    return c;
  }();
  return table;
}

Complex power_minus(double base, Complex s) { return std::exp(-s * std::log(base)); }

// sum_{n>=0} (n + x)^{-s} minus its pole part x^{1-s} / (s - 1).
Complex em_remainder(Complex s, double x) {
  const auto& c = bernoulli_over_factorial();
  const Complex x_pow = power_minus(x, s);
  Complex sum = 0.5 * x_pow;
  Complex rising = s;            // s (s+1) ... (s + 2j - 2)
  Complex x_term = x_pow / x;    // x^{-s-2j+1}
  for (int j = 1; j <= kBernoulliTerms; ++j) {
    sum += c[static_cast<std::size_t>(j)] * rising * x_term;
    rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    x_term /= x * x;
  }
  return sum;
}

// (x^{1-s} - 1) / (s - 1), finite at s = 1.
Complex pole_part_shifted(Complex s, double x) {
  const Complex u = 1.0 - s;
  const Complex ul = u * std::log(x);
  if (std::abs(ul) < 1e-3) {
    return -std::log(x) * (1.0 + ul / 2.0 + ul * ul / 6.0 + ul * ul * ul / 24.0 + ul * ul * ul * ul / 120.0);
  }
  return (std::exp(ul) - 1.0) / (-u);
}

// Start of the Euler-Maclaurin tail: large enough that |s| / (2 pi x) < 1/4.
double tail_start(Complex s) { return std::abs(s) + 30.0; }

Complex complex_log1p(Complex z) {
  if (std::abs(z) < 1e-2) {
    // z - z^2/2 + z^3/3 - ...; 9 terms reach 1e-18.
    Complex term = z, sum = 0.0;
    for (int m = 1; m <= 9; ++m) {
      sum += term / static_cast<double>(m);
      term *= -z;
    }
    return sum;
  }
  return std::log(1.0 + z);
}

void require_sigma_positive(ComplexPoint s) {
  if (!std::isfinite(s.sigma) || !std::isfinite(s.t_im)) throw DomainError("s must be finite");
  if (!(s.sigma > 0.0)) throw DomainError("sigma must be > 0");
}

Complex zeta_borwein(Complex s) {
  const double t = std::abs(s.imag());
  const int n = static_cast<int>(
      std::ceil((0.5 * std::numbers::pi * t + std::log(3.0 * (1.0 + 2.0 * t)) + 32.0) / std::log(3.0 + std::sqrt(8.0)))) +
                5;
  // d_k / d_n with d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!).
  std::vector<double> d(static_cast<std::size_t>(n) + 1);
  double term = 1.0, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) {
      term *= 4.0 * static_cast<double>(n + i - 1) * static_cast<double>(n - i + 1) /
              (static_cast<double>(2 * i) * static_cast<double>(2 * i - 1));
    }
    acc += term;
    d[static_cast<std::size_t>(i)] = acc;
  }
  const double dn = d.back();
  Complex eta = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const double weight = d[static_cast<std::size_t>(k)] / dn - 1.0;
    const Complex v = weight * power_minus(static_cast<double>(k + 1), s);
    eta += (k % 2 == 0) ? v : -v;
  }
  eta = -eta;
  return eta / (1.0 - std::exp((1.0 - s) * std::numbers::ln2));
}

}  // namespace

Complex euler_factor_log(const DirichletCharacter& chi, std::uint64_t p, ComplexPoint s) {
  const Complex chi_p = chi.evaluate(static_cast<std::int64_t>(p));
  if (chi_p == Complex{0.0, 0.0}) return {0.0, 0.0};
  const Complex w = chi_p * power_minus(static_cast<double>(p), s.value());
  return -complex_log1p(-w);
}

ProductTrace log_euler_product(const PseudoPrimeState& state, const DirichletCharacter& chi, ComplexPoint s,
                               std::size_t n_factors, bool include_two) {
  require_sigma_positive(s);
  if (include_two && state.kind() != StateKind::ActualPrimes) {
    throw DomainError("the p = 2 factor applies only to the actual primes");
  }
  ProductTrace trace;
  trace.primes.reserve(n_factors + 1);
  trace.partial_log.reserve(n_factors + 1);
  Complex acc = 0.0;
  if (include_two) {
    acc += euler_factor_log(chi, 2, s);
    trace.primes.push_back(2);
    trace.partial_log.push_back(acc);
  }
  std::size_t used = 0;
  if (n_factors > 0) {
    state.for_each_member(state.cutoff(), [&](std::uint64_t p) {
      if (used == n_factors) return;
      acc += euler_factor_log(chi, p, s);
      trace.primes.push_back(p);
      trace.partial_log.push_back(acc);
      ++used;
    });
  }
  if (used < n_factors) {
    throw InsufficientStateError("state holds " + std::to_string(used) + " members, " + std::to_string(n_factors) +
                                 " factors requested");
  }
  trace.n_factors = trace.partial_log.size();
  return trace;
}

std::vector<double> c_partial_sums(const PseudoPrimeState& state, const DirichletCharacter& chi,
                                   std::uint64_t n_terms) {
  std::vector<double> sums;
  sums.reserve(n_terms);
  double acc = 0.0;
  if (n_terms > 0) {
    state.for_each_member(state.cutoff(), [&](std::uint64_t n) {
      if (sums.size() == n_terms) return;
      acc += chi.cos_theta(n);
      sums.push_back(acc);
    });
  }
  if (sums.size() < n_terms) {
    throw InsufficientStateError("state holds " + std::to_string(sums.size()) + " members, " +
                                 std::to_string(n_terms) + " requested");
  }
  return sums;
}

Complex hurwitz_zeta(Complex s, double q) {
  if (!(q > 0.0)) throw DomainError("Hurwitz zeta needs q > 0");
  if (s == Complex{1.0, 0.0}) throw DomainError("zeta has a pole at s = 1");
  const auto m = static_cast<int>(std::ceil(std::max(0.0, tail_start(s) - q)));
  Complex sum = 0.0;
  for (int n = m - 1; n >= 0; --n) sum += power_minus(static_cast<double>(n) + q, s);
  const double x = static_cast<double>(m) + q;
  return sum + std::exp((1.0 - s) * std::log(x)) / (s - 1.0) + em_remainder(s, x);
}

Complex zeta_reference(ComplexPoint s) {
  require_sigma_positive(s);
  if (s.sigma == 1.0 && s.t_im == 0.0) throw DomainError("zeta has a pole at s = 1");
  if (std::abs(s.t_im) > kZetaMaxImag) throw DomainError("zeta_reference is limited to |Im s| <= 200");
  const Complex z = s.value();
  const Complex denom = 1.0 - std::exp((1.0 - z) * std::numbers::ln2);
  if (std::abs(denom) < 0.05) return hurwitz_zeta(z, 1.0);
  return zeta_borwein(z);
}

TruncatedZeta zeta_truncated(ComplexPoint s, double t_for_cutoff, double c_mult) {
  if (!(s.sigma > 0.5)) throw DomainError("truncated Euler product needs sigma > 1/2");
  if (!(t_for_cutoff >= 2.0)) throw DomainError("cutoff height t must be >= 2");
  if (!(c_mult > 0.0)) throw DomainError("c_mult must be > 0");
  const auto n_primes =
      std::max<std::uint64_t>(static_cast<std::uint64_t>(std::ceil(c_mult * t_for_cutoff * t_for_cutoff)), 10);
  const auto primes = sieve_actual(odd_prime_bound(n_primes - 1));
  const auto trivial = *builtin_character("trivial");
  const auto trace = log_euler_product(primes, trivial, s, n_primes - 1, true);
  TruncatedZeta out;
  out.n_primes = n_primes;
  out.product_log = trace.partial_log.back();
  Complex r = std::log(zeta_reference(s)) - out.product_log;
  const double two_pi = 2.0 * std::numbers::pi;
  double im = std::remainder(r.imag(), two_pi);
  if (im <= -std::numbers::pi) im += two_pi;
  out.residual = {r.real(), im};
  return out;
}

Complex l_reference(const DirichletCharacter& chi, ComplexPoint s) {
  if (chi.is_principal()) throw DomainError("l_reference needs a non-principal character");
  if (!std::isfinite(s.sigma) || !std::isfinite(s.t_im)) throw DomainError("s must be finite");
  if (!(s.sigma > 0.05)) throw DomainError("l_reference needs sigma > 0.05");
  const Complex z = s.value();
  const std::uint64_t k = chi.modulus();
  const auto periods = static_cast<std::uint64_t>(std::ceil(tail_start(z) / static_cast<double>(k))) + 1;
  Complex head = 0.0;
  for (std::uint64_t n = periods * k; n >= 1; --n) {
    if (!chi.nonzero_at(n)) continue;
    head += chi.evaluate(static_cast<std::int64_t>(n)) * power_minus(static_cast<double>(n), z);
  }
  // sum_{j >= periods} (jk + a)^{-s} = k^{-s} zeta(s, periods + a/k).
  Complex tail = 0.0;
  for (std::uint64_t a = 1; a <= k; ++a) {
    if (!chi.nonzero_at(a)) continue;
    const double x = static_cast<double>(periods) + static_cast<double>(a) / static_cast<double>(k);
    tail += chi.evaluate(static_cast<std::int64_t>(a)) * (pole_part_shifted(z, x) + em_remainder(z, x));
  }
  return head + power_minus(static_cast<double>(k), z) * tail;
}

void write_trace_csv(std::ostream& out, const ProductTrace& trace) {
  out << "n,p_n,re_log,im_log\n";
  for (std::size_t j = 0; j < trace.partial_log.size(); ++j) {
    out << fmt::format("{},{},{:.17g},{:.17g}\n", j + 1, trace.primes[j], trace.partial_log[j].real(),
                       trace.partial_log[j].imag());
  }
}

}  // namespace cramer
