#include "cramer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "cramer/errors.hpp"

namespace cramer {

Histogram histogram(std::span<const double> samples, std::size_t bins) {
  if (samples.empty()) throw DomainError("histogram of an empty sample");
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.n_samples = samples.size();
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;

  std::vector<std::uint64_t> counts(bins, 0);
  for (const double x : samples) {
    auto i = static_cast<std::size_t>((x - lo) / width);
    if (i >= bins) i = bins - 1;  // x == hi
    ++counts[i];
  }
  h.density.resize(bins);
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < bins; ++i) {
    h.density[i] = static_cast<double>(counts[i]) / (n * (h.edges[i + 1] - h.edges[i]));
  }
  return h;
}

NormalFit fit_normal(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientDataError("a normal fit needs at least 2 samples");
  // Welford.
  double mean = 0.0, m2 = 0.0;
  std::uint64_t n = 0;
  for (const double x : samples) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n - 1)), n};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double kolmogorov_survival(double lambda) {
  // Below 0.2 the survival function equals 1 to within 1e-12 and the
  // truncated alternating series is no longer accurate.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples) {
  if (samples.size() < 8) throw InsufficientDataError("KS test needs at least 8 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    const double below = f - static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n - f;
    d = std::max({d, below, above});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_left,bin_right,density\n";
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    out << fmt::format("{:.12g},{:.12g},{:.12g}\n", h.edges[i], h.edges[i + 1], h.density[i]);
  }
}

}  // namespace cramer
