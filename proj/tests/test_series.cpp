#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cramer/errors.hpp"
#include "cramer/pseudoprimes.hpp"
#include "cramer/series.hpp"

using namespace cramer;

namespace {

// Reference values computed with mpmath at 40 digits.
struct EiCase {
  double t, x, diff;
};
constexpr EiCase kEiDiff[] = {
    {0, 10, 4.0020109101201059646},      {0, 1e3, 175.44606939548503471},
    {0, 1e6, 78625.385570867514728},     {1, 10, -0.67217794856831267186},
    {1, 1e3, 104.13392141082288099},     {1, 1e6, 48357.105516936734741},
    {10, 10, -0.11302858670894958441},   {10, 1e3, 0.95999685511232619085},
    {10, 1e6, 126.50866019363873465},    {100, 10, -0.037310583580305275685},
    {100, 1e3, -0.52103203684506804963}, {100, 1e6, -488.28009696325967404},
};

// integral_a^b cos(t ln u) / ln u du by Gauss-Kronrod in u, one panel per
// quarter-period of the cosine (in ln u).
double u_oracle(double t, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [t](double u) { return std::cos(t * std::log(u)) / std::log(u); };
  const double step = t > 0 ? std::min(0.1, std::numbers::pi / (2 * t)) : 0.1;
  double sum = 0.0, v = std::log(a);
  const double vb = std::log(b);
  while (v < vb) {
    const double w = std::min(vb, v + step);
    sum += Rule::integrate(f, std::exp(v), w == vb ? b : std::exp(w), 10, 1e-13);
    v = w;
  }
  return sum;
}

std::uint64_t floor_n_ln_n(std::uint64_t n) {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * std::log(static_cast<double>(n))));
}

}  // namespace

TEST_SUITE("series") {
  TEST_CASE("ei_re differences against mpmath") {
    for (const auto& c : kEiDiff) {
      CAPTURE(c.t);
      CAPTURE(c.x);
      CHECK(ei_re(c.t, c.x) - ei_re(c.t, 3.0) == doctest::Approx(c.diff).epsilon(1e-9));
      CHECK(log_cos_integral(c.t, 3.0, c.x) == doctest::Approx(c.diff).epsilon(1e-9));
    }
  }

  TEST_CASE("absolute ei_re values") {
    CHECK(ei_re(0, 10) == doctest::Approx(6.1655995047872979375).epsilon(1e-12));
    CHECK(ei_re(0, 1e6) == doctest::Approx(78627.54915946218192).epsilon(1e-12));
    CHECK(ei_re(1, 10) == doctest::Approx(1.2261298893059260368).epsilon(1e-11));
    CHECK(ei_re(10, 1e3) == doctest::Approx(0.68906739669910266177).epsilon(1e-10));
    CHECK(ei_re(100, 10) == doctest::Approx(-0.034758165656109887695).epsilon(1e-9));
    CHECK(ei_re(100, 1e6) == doctest::Approx(-488.27754454533547865).epsilon(1e-11));
    CHECK(ei_re(-10, 1e3) == doctest::Approx(ei_re(10, 1e3)).epsilon(1e-14));
    CHECK_THROWS_AS(ei_re(1, 1.0), DomainError);
    CHECK_THROWS_AS(ei_re(NAN, 10), DomainError);
  }

  TEST_CASE("log_cos_integral against u-variable Gauss-Kronrod") {
    for (double t : {0.0, 0.5, 3.0, 37.0, 250.0}) {
      for (double x : {4.0, 77.0, 5000.0}) {
        CAPTURE(t);
        CAPTURE(x);
        CHECK(log_cos_integral(t, 3.0, x) == doctest::Approx(u_oracle(t, 3.0, x)).epsilon(1e-9));
      }
    }
    CHECK(log_cos_integral(5, 100, 10) == doctest::Approx(-log_cos_integral(5, 10, 100)));
    CHECK(log_cos_integral(5, 10, 10) == 0.0);
  }

  TEST_CASE("m_N_ei against mpmath") {
    CHECK(m_N_ei(0, 100, 1) == doctest::Approx(93.235192887288).epsilon(1e-10));
    CHECK(m_N_ei(5, 100, 1) == doctest::Approx(-7.8482775367641).epsilon(1e-10));
    CHECK(m_N_ei(1000, 100, 1) == doctest::Approx(-0.00065549601502).epsilon(1e-8));
    CHECK(m_N_ei(2000, 100, 1) == doctest::Approx(-0.0016174301533).epsilon(1e-8));
    CHECK(m_N_ei(0, 1000, 1) == doctest::Approx(901.74055056386).epsilon(1e-10));
    CHECK(m_N_ei(5, 1000, 1) == doctest::Approx(59.566672015203).epsilon(1e-10));
    CHECK(m_N_ei(1000, 1000, 1) == doctest::Approx(-0.029679739080).epsilon(1e-8));
    CHECK(m_N_ei(0, 5000, 1) == doctest::Approx(4474.1582413209).epsilon(1e-10));
    CHECK(m_N_ei(5, 5000, 1) == doctest::Approx(-53.435600180220).epsilon(1e-10));
    CHECK(m_N_ei(1000, 5000, 1) == doctest::Approx(0.57129336251201).epsilon(1e-8));
    CHECK(m_N_ei(2000, 5000, 1) == doctest::Approx(-0.56458578397363).epsilon(1e-8));
    // phi(k)/k scaling.
    CHECK(m_N_ei(5, 1000, 12) == doctest::Approx(59.566672015203 / 3).epsilon(1e-10));
  }

  TEST_CASE("m_N_approx tracks the Ei mean at large t") {
    for (std::uint64_t n : {1000, 5000, 20000}) {
      for (double t : {50.0, 200.0, 1000.0}) {
        const double nn = static_cast<double>(n);
        const double envelope = nn / (1 + std::log(std::log(nn)) / std::log(nn)) / t;
        const double exact = m_N_ei(t, n, 1);
        const double approx = m_N_approx(t, n, 1);
        CAPTURE(n);
        CAPTURE(t);
        CHECK(std::abs(exact - approx) <= 1.5 / t * envelope + 2.0);
        if (std::abs(std::sin(t * std::log(nn * std::log(nn)))) >= 0.5) {
          CHECK(std::abs(exact - approx) <= 0.05 * std::abs(exact) + 2.0);
        }
      }
    }
  }

  TEST_CASE("prefactor and variances") {
    const double ln5000 = std::log(5000.0);
    const double corr = 1 + std::log(ln5000) / ln5000;
    CHECK(clt_prefactor(5000, 3.0 / 7.0) == doctest::Approx(std::sqrt(corr / (3.0 / 7.0 * 5000))).epsilon(1e-15));
    CHECK(clt_prefactor(5000, 3.0 / 7.0) == doctest::Approx(0.0241668).epsilon(1e-5));
    CHECK(s_N2_b(1000, 5000, 1, true) == doctest::Approx(1997.6).epsilon(1e-4));
    // The exact B variance approaches the shortcut at large t.
    const double exact = s_N2_b(1000, 5000, 1);
    CHECK(exact == doctest::Approx(0.5 * (4474.1582413209 + m_N_ei(2000, 5000, 1))).epsilon(1e-10));
    CHECK(std::abs(exact / s_N2_b(1000, 5000, 1, true) - 1) < 0.15);
    CHECK_THROWS_AS(clt_prefactor(2, 1.0), DomainError);
    CHECK_THROWS_AS(clt_prefactor(100, 0.0), DomainError);
    CHECK(normalize_c(10.0, 5000, 7, 0.5) == doctest::Approx(10.0 * clt_prefactor(5000, 3.0 / 7.0)));
    CHECK(normalize_b_with_mean(12.0, 2.0, 5000, 1) == doctest::Approx(10.0 * clt_prefactor(5000, 0.5)));
    CHECK(normalize_b(3.0, 1000, 5000, 1) ==
          doctest::Approx((3.0 - 0.57129336251201) * clt_prefactor(5000, 0.5)).epsilon(1e-9));
  }

  TEST_CASE("expected cutoff and upper limits") {
    CHECK(expected_cutoff(5000) == floor_n_ln_n(5000));
    CHECK(expected_cutoff(5000) == 42585);
    CHECK(expected_cutoff(1) == 3);
    CHECK(expected_cutoff(2) == 3);
    const auto primes = sieve_actual(50000);
    CHECK(series_upper_limit(primes, 4999, PrefixRule::NthMember) == 48611);
    CHECK(series_upper_limit(primes, 5000, PrefixRule::ExpectedCutoff) == 42585);
    CHECK_THROWS_AS(series_upper_limit(sieve_actual(1000), 5000, PrefixRule::ExpectedCutoff), InsufficientStateError);
  }

  TEST_CASE("series over an explicit state") {
    const auto chi = paper_chi7();
    const auto s = PseudoPrimeState::from_members(std::vector<std::uint64_t>{3, 4, 7, 9, 12, 20}, 30);
    // Angles of 3, 4, 7, 9, 12: 1/6, 2/3, zero, 1/3 (9 = 2 mod 7), 5/6 (12 = 5 mod 7).
    const double two_pi = 2 * std::numbers::pi;
    const double c4 = std::cos(two_pi / 6) + std::cos(two_pi * 2 / 3) + 0.0 + std::cos(two_pi / 3);
    CHECK(c_series(s, chi, 4) == doctest::Approx(c4).epsilon(1e-14));
    const double c5 = c4 + std::cos(two_pi * 5 / 6);
    CHECK(c_series(s, chi, 5) == doctest::Approx(c5).epsilon(1e-14));
    CHECK(c_series(s, chi, 0) == 0.0);
    CHECK_THROWS_AS(c_series(s, chi, 7), InsufficientStateError);
    CHECK_THROWS_AS(c_series(s, character_at(7, 0), 3), WrongSeriesError);

    double b = 0;
    for (std::uint64_t n : {3, 4, 7, 9}) b += std::cos(2.5 * std::log(static_cast<double>(n)));
    CHECK(b_series(s, 2.5, 4, 1) == doctest::Approx(b).epsilon(1e-14));
    // k = 3 drops 3, 9, 12.
    CHECK(b_series(s, 2.5, 4, 3) == doctest::Approx(std::cos(2.5 * std::log(4.0)) + std::cos(2.5 * std::log(7.0))));

    const double g = std::cos(two_pi / 6 + 0.7 * std::log(3.0)) + std::cos(two_pi * 2 / 3 + 0.7 * std::log(4.0));
    CHECK(general_series(s, chi, 0.7, 2) == doctest::Approx(g).epsilon(1e-14));
    CHECK(general_series(s, chi, 0.0, 5) == doctest::Approx(c5).epsilon(1e-14));
  }

  TEST_CASE("kernels") {
    const auto k = SeriesKernel::principal(6, 0.0);
    CHECK(k(5) == 1.0);
    CHECK(k(9) == 0.0);
    CHECK(SeriesKernel::principal(1, 2.0)(10) == doctest::Approx(std::cos(2.0 * std::log(10.0))));
    CHECK(SeriesKernel::character(paper_chi7(), 1.0)(14) == 0.0);
    CHECK_THROWS_AS(SeriesKernel::principal(0, 1.0), DomainError);
    CHECK_THROWS_AS(SeriesKernel::principal(1, INFINITY), DomainError);
  }

  TEST_CASE("lyapunov ratio against a direct Bernoulli moment sum") {
    for (double delta : {1.0, 0.5}) {
      const auto kernel = SeriesKernel::character(paper_chi7());
      const std::uint64_t upper = floor_n_ln_n(300);
      double num = 0, var = 0;
      for (std::uint64_t n = 3; n <= upper; ++n) {
        const double c = std::abs(kernel(n));
        const double q = 1 / std::log(static_cast<double>(n));
        // |x - mu| is (1-q)|c| with probability q and q|c| with probability 1-q.
        num += q * std::pow((1 - q) * c, 2 + delta) + (1 - q) * std::pow(q * c, 2 + delta);
        var += q * (1 - q) * c * c;
      }
      CHECK(lyapunov_ratio(kernel, 300, delta) == doctest::Approx(num / std::pow(var, 1 + delta / 2)).epsilon(1e-12));
    }
    const auto principal = SeriesKernel::principal(1, 0.0);
    const double r = lyapunov_ratio(principal, 4000, 1) / lyapunov_ratio(principal, 1000, 1);
    CHECK(r > 0.4);
    CHECK(r < 0.6);
    CHECK_THROWS_AS(lyapunov_ratio(principal, 100, 0.0), DomainError);
  }

  TEST_CASE("tail probability") {
    CHECK(tail_probability(2, 0, 5000) == doctest::Approx(1 - std::exp(-4.0) / (2 * std::sqrt(2 * std::numbers::pi))));
    CHECK(tail_probability(2, 0, 5000) == doctest::Approx(0.99635).epsilon(1e-5));
    CHECK(tail_probability(1, 0.1, 5000) > tail_probability(1, 0.0, 5000));
    CHECK_THROWS_AS(tail_probability(0, 0, 100), DomainError);
    CHECK_THROWS_AS(tail_probability(1, -0.1, 100), DomainError);
  }

  TEST_CASE("result records") {
    const auto r = make_c_result(-6.0, 5000, paper_chi7(), 17);
    CHECK(r.normalized == doctest::Approx(normalize_c(-6.0, 5000, 7, 0.5)));
    CHECK(r.variance == doctest::Approx(1.0 / (clt_prefactor(5000, 3.0 / 7.0) * clt_prefactor(5000, 3.0 / 7.0))));
    CHECK(r.state_seed == 17);
    const auto b = make_b_result(5.0, 1000, 0.5, 5000, 1, 3);
    CHECK(b.normalized == doctest::Approx(4.5 * clt_prefactor(5000, 0.5)));
    CHECK(b.variance == doctest::Approx(s_N2_b(1000, 5000, 1, true)));
  }
}
