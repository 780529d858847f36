#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with optional
// endpoint transforms for integrable inverse-square-root singularities.

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "geosched/errors.hpp"

namespace geosched::quadrature {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::size_t kDefaultIntervalBudget = 4000;

namespace detail {

// Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
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

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gauss_kronrod(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

// Integral of f over [lo, hi] with estimated absolute error <= abs_tol.
// Throws IntegrationError if the budget of subintervals is exhausted or the
// integrand produces non-finite values.
template <typename F>
double integrate(F&& f, double lo, double hi, double abs_tol = kDefaultTolerance,
                 std::size_t max_intervals = kDefaultIntervalBudget) {
  if (lo == hi) return 0.0;
  std::priority_queue<detail::Segment> queue;
  auto first = detail::gauss_kronrod(f, lo, hi);
  double total = first.value;
  double error = first.error;
  queue.push(first);
  std::size_t intervals = 1;
  while (error > abs_tol) {
    if (!std::isfinite(total) || !std::isfinite(error)) {
      throw IntegrationError("quadrature: non-finite integrand");
    }
    if (intervals >= max_intervals) {
      throw IntegrationError("quadrature: subdivision budget exhausted (integrand not integrable?)");
    }
    const auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::gauss_kronrod(f, worst.lo, mid);
    auto right = detail::gauss_kronrod(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running updates.
  double sum = 0.0;
  while (!queue.empty()) {
    sum += queue.top().value;
    queue.pop();
  }
  if (!std::isfinite(sum)) throw IntegrationError("quadrature: non-finite integrand");
  return sum;
}

// Integral of f over [lo, hi] where f may blow up like 1/sqrt(distance) at
// the flagged endpoints. The map r = lo + (hi-lo) sin^2(theta) (both ends)
// or r = lo + (hi-lo) u^2 (one end) makes the transformed integrand bounded.
template <typename F>
double integrate_singular(F&& f, double lo, double hi, bool singular_lo, bool singular_hi,
                          double abs_tol = kDefaultTolerance,
                          std::size_t max_intervals = kDefaultIntervalBudget) {
  const double width = hi - lo;
  if (width == 0.0) return 0.0;
  if (singular_lo && singular_hi) {
    auto g = [&](double theta) {
      const double s = std::sin(theta);
      const double c = std::cos(theta);
      const double r = lo + width * s * s;
      return f(r) * 2.0 * width * s * c;
    };
    return integrate(g, 0.0, 0.5 * M_PI, abs_tol, max_intervals);
  }
  if (singular_lo) {
    auto g = [&](double u) { return f(lo + width * u * u) * 2.0 * width * u; };
    return integrate(g, 0.0, 1.0, abs_tol, max_intervals);
  }
  if (singular_hi) {
    auto g = [&](double u) { return f(hi - width * u * u) * 2.0 * width * u; };
    return integrate(g, 0.0, 1.0, abs_tol, max_intervals);
  }
  return integrate(f, lo, hi, abs_tol, max_intervals);
}

}  // namespace geosched::quadrature
