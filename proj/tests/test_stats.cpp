#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "cramer/errors.hpp"
#include "cramer/rng.hpp"
#include "cramer/stats.hpp"

using namespace cramer;

namespace {

// Normal quantiles at (i + 1/2) / n: a sample whose empirical CDF hugs Phi.
std::vector<double> quantile_grid(std::size_t n, double mu = 0.0, double sd = 1.0) {
  const boost::math::normal dist(mu, sd);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = quantile(dist, (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return xs;
}

// Brute-force KS distance: sup over sample points of both one-sided gaps.
double ks_brute(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const boost::math::normal dist;
  double d = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(dist, xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("normal cdf and pdf against Boost") {
    const boost::math::normal dist;
    for (double x : {-6.0, -2.5, -1.0, 0.0, 0.3, 1.0, 2.0, 8.0}) {
      CHECK(normal_cdf(x) == doctest::Approx(cdf(dist, x)).epsilon(1e-14));
      CHECK(normal_pdf(x) == doctest::Approx(pdf(dist, x)).epsilon(1e-14));
    }
  }

  TEST_CASE("kolmogorov survival function") {
    // Q(1) = 0.27 (standard table value, 0.26999967...).
    CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.2699996716773546).epsilon(1e-12));
    CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(1e-2));
    CHECK(kolmogorov_survival(0.1) == 1.0);
    CHECK(kolmogorov_survival(5.0) < 1e-20);
    for (double l = 0.2; l < 3; l += 0.05) CHECK(kolmogorov_survival(l) >= kolmogorov_survival(l + 0.05));
  }

  TEST_CASE("histogram densities integrate to one") {
    std::vector<double> xs;
    for (std::uint64_t i = 0; i < 1000; ++i) xs.push_back(uniform01(9, i) * 4 - 1);
    const auto h = histogram(xs, 17);
    REQUIRE(h.edges.size() == 18);
    REQUIRE(h.density.size() == 17);
    double mass = 0;
    for (std::size_t i = 0; i < 17; ++i) mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.edges.front() == *std::min_element(xs.begin(), xs.end()));
    CHECK(h.edges.back() == *std::max_element(xs.begin(), xs.end()));
    CHECK(h.n_samples == 1000);
  }

  TEST_CASE("histogram of a constant sample") {
    const std::vector<double> xs(5, 2.0);
    const auto h = histogram(xs, 4);
    CHECK(h.edges.front() == 1.5);
    CHECK(h.edges.back() == 2.5);
    CHECK_THROWS_AS(histogram(std::vector<double>{}, 4), DomainError);
    CHECK_THROWS_AS(histogram(xs, 0), DomainError);
  }

  TEST_CASE("normal fit") {
    const std::vector<double> xs{1, 2, 3, 4, 5, 6};
    const auto fit = fit_normal(xs);
    CHECK(fit.mu_hat == doctest::Approx(3.5));
    CHECK(fit.sigma_hat == doctest::Approx(std::sqrt(3.5)));
    CHECK(fit.n == 6);
    const auto g = fit_normal(quantile_grid(20000, 0.3, 2.0));
    CHECK(g.mu_hat == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(g.sigma_hat == doctest::Approx(2.0).epsilon(1e-3));
    CHECK_THROWS_AS(fit_normal(std::vector<double>{1.0}), InsufficientDataError);
  }

  TEST_CASE("KS statistic against brute force") {
    std::vector<double> xs;
    for (std::uint64_t i = 0; i < 500; ++i) xs.push_back(std::sqrt(-2 * std::log(1 - uniform01(5, 2 * i))) *
                                                         std::cos(2 * 3.141592653589793 * uniform01(5, 2 * i + 1)));
    const auto r = ks_test(xs);
    CHECK(r.statistic == doctest::Approx(ks_brute(xs)).epsilon(1e-14));
    CHECK(r.p_value > 0.001);
  }

  TEST_CASE("KS detects a shifted sample") {
    const auto good = ks_test(quantile_grid(2000));
    CHECK(good.statistic < 1e-3);
    CHECK(good.p_value == 1.0);
    const auto bad = ks_test(quantile_grid(2000, 0.3));
    CHECK(bad.p_value < 1e-6);
    CHECK_THROWS_AS(ks_test(std::vector<double>(7, 0.0)), InsufficientDataError);
  }

  TEST_CASE("histogram csv") {
    const auto h = histogram(std::vector<double>{0, 1, 2, 3}, 2);
    std::ostringstream out;
    write_histogram_csv(out, h);
    CHECK(out.str() == "bin_left,bin_right,density\n0,1.5,0.333333333333\n1.5,3,0.333333333333\n");
  }
}
