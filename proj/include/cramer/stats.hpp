#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cramer {

// Normalized histogram: sum density[i] * (edges[i+1] - edges[i]) == 1.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> density;
  std::uint64_t n_samples = 0;
};

struct NormalFit {
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
  std::uint64_t n = 0;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Equal-width bins over [min, max]; a zero-width span is widened by +-0.5.
Histogram histogram(std::span<const double> samples, std::size_t bins);

// Sample mean and standard deviation (n - 1 denominator).
NormalFit fit_normal(std::span<const double> samples);

// Standard normal CDF and density.
double normal_cdf(double x);
double normal_pdf(double x);

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2),
// first 100 terms.
double kolmogorov_survival(double lambda);

// One-sample Kolmogorov-Smirnov test against the standard normal (n >= 8).
KsResult ks_test(std::span<const double> samples);

// "bin_left,bin_right,density" rows with 12 significant digits.
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace cramer
