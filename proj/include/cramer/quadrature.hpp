#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>

namespace cramer::quad {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double value;
  double error;
};

template <class F>
Estimate gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[static_cast<std::size_t>(i)];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

namespace detail {

template <class F>
double refine(F& f, double a, double b, const Estimate& whole, double rel_tol, double abs_tol, int depth) {
  if (whole.error <= std::max(abs_tol, rel_tol * std::abs(whole.value)) ||
      std::abs(b - a) < 64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
    return whole.value;
  }
  const double mid = 0.5 * (a + b);
  const Estimate left = gk15(f, a, mid), right = gk15(f, mid, b);
  const double err = left.error + right.error;
  // Bisection no longer helps once the estimate is dominated by rounding
  // noise in f (e.g. cos of a large argument).
  if (depth <= 0 || (err >= 0.5 * whole.error && err <= 1e-10 * (std::abs(left.value) + std::abs(right.value)))) {
    return left.value + right.value;
  }
  return refine(f, a, mid, left, rel_tol, 0.5 * abs_tol, depth - 1) +
         refine(f, mid, b, right, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

// Recursive bisection until the Kronrod/Gauss difference is below
// max(abs_tol, rel_tol * |value|) on each piece, or has reached the
// rounding floor of f.
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol, double abs_tol, int depth = 40) {
  return detail::refine(f, a, b, gk15(f, a, b), rel_tol, abs_tol, depth);
}

}  // namespace cramer::quad
