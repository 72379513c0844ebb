#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cramer/characters.hpp"
#include "cramer/pseudoprimes.hpp"

namespace cramer {

using Complex = std::complex<double>;

// s = sigma + i t_im.
struct ComplexPoint {
  double sigma = 0.0;
  double t_im = 0.0;

  Complex value() const noexcept { return {sigma, t_im}; }
};

// Running logarithm of an Euler product: partial_log[j] is the sum of the
// first j + 1 factor logarithms -log(1 - chi(p) p^{-s}), each on the principal
// branch. primes[j] is the prime (or pseudo-prime) of factor j.
struct ProductTrace {
  std::vector<std::uint64_t> primes;
  std::vector<Complex> partial_log;
  std::size_t n_factors = 0;
};

// -log(1 - chi(p) p^{-s}) on the principal branch.
Complex euler_factor_log(const DirichletCharacter& chi, std::uint64_t p, ComplexPoint s);

// Product over the first n_factors members of the state. include_two prepends
// the p = 2 factor (only for ACTUAL_PRIMES states, where 2 is the one prime
// the state leaves out).
ProductTrace log_euler_product(const PseudoPrimeState& state, const DirichletCharacter& chi, ComplexPoint s,
                               std::size_t n_factors, bool include_two = false);

// C'_1, ..., C'_N over the first N members (any character).
std::vector<double> c_partial_sums(const PseudoPrimeState& state, const DirichletCharacter& chi, std::uint64_t n_terms);

// Largest |t_im| for which zeta_reference is accurate.
inline constexpr double kZetaMaxImag = 200.0;

// zeta(s) for sigma > 0, s != 1, |t_im| <= 200, via the Borwein accelerated
// alternating series for eta(s); falls back to Euler-Maclaurin where
// 1 - 2^{1-s} is near zero.
Complex zeta_reference(ComplexPoint s);

// Hurwitz zeta(s, q) for q > 0, s != 1 by Euler-Maclaurin summation.
Complex hurwitz_zeta(Complex s, double q);

struct TruncatedZeta {
  Complex product_log;
  Complex residual;
  std::uint64_t n_primes = 0;
};

// Truncated Euler product over the first N(t) = max(ceil(c_mult t^2), 10)
// primes and the remainder log zeta(s) - product_log (imaginary part reduced
// to (-pi, pi]). Requires sigma > 1/2.
TruncatedZeta zeta_truncated(ComplexPoint s, double t_for_cutoff, double c_mult = 1.0);

// L(s, chi) for non-principal chi and sigma > 0.05: direct sum over whole
// periods plus an Euler-Maclaurin tail for each residue class.
Complex l_reference(const DirichletCharacter& chi, ComplexPoint s);

// "n,p_n,re_log,im_log" rows.
void write_trace_csv(std::ostream& out, const ProductTrace& trace);

}  // namespace cramer
