#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with maps for
// semi-infinite and infinite ranges.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace leakage::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[j] * sum;
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over the finite interval [a, b].
template <class F>
Result integrate_finite(F f, double a, double b, const Options& opt = {}) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gauss_kronrod(f, a, b));
  out.evaluations = 15;
  double total = heap.top().value;
  double total_error = heap.top().error;
  int intervals = 1;
  while (total_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         intervals < opt.max_intervals) {
    const detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    heap.pop();
    const auto left = detail::gauss_kronrod(f, worst.a, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.b);
    out.evaluations += 30;
    heap.push(left);
    heap.push(right);
    ++intervals;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
  }
  total = 0.0;
  total_error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_error += heap.top().error;
    heap.pop();
  }
  out.value = sign * total;
  out.error = total_error;
  out.converged = total_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return out;
}

/// Integrates f over [a, +inf) using x = a + scale * t / (1 - t).
template <class F>
Result integrate_upper(F f, double a, double scale = 1.0, const Options& opt = {}) {
  auto g = [&](double t) {
    const double u = 1.0 - t;
    const double x = a + scale * t / u;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * scale / (u * u);
  };
  return integrate_finite(g, 0.0, 1.0, opt);
}

/// Integrates f over (-inf, b] using x = b - scale * t / (1 - t).
template <class F>
Result integrate_lower(F f, double b, double scale = 1.0, const Options& opt = {}) {
  auto g = [&](double t) {
    const double u = 1.0 - t;
    const double x = b - scale * t / u;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * scale / (u * u);
  };
  return integrate_finite(g, 0.0, 1.0, opt);
}

/// Integrates f over (a, b) where either endpoint may be infinite. The
/// optional breakpoints split the range; the tolerance is shared between parts.
template <class F>
Result integrate(F f, double a, double b, std::vector<double> breaks = {}, double scale = 1.0,
                 const Options& opt = {}) {
  std::erase_if(breaks, [&](double x) { return !std::isfinite(x) || x <= a || x >= b; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> points;
  points.push_back(a);
  points.insert(points.end(), breaks.begin(), breaks.end());
  points.push_back(b);

  // Two infinite ends with no breakpoint need one anchor.
  if (points.size() == 2 && std::isinf(a) && std::isinf(b)) points.insert(points.begin() + 1, 0.0);

  const std::size_t parts = points.size() - 1;
  Options part_opt = opt;
  part_opt.abs_tol = opt.abs_tol / static_cast<double>(parts);

  Result out;
  out.converged = true;
  for (std::size_t i = 0; i < parts; ++i) {
    const double lo = points[i];
    const double hi = points[i + 1];
    Result r;
    if (std::isinf(lo) && std::isinf(hi)) {
      continue;
    } else if (std::isinf(lo)) {
      r = integrate_lower(f, hi, scale, part_opt);
    } else if (std::isinf(hi)) {
      r = integrate_upper(f, lo, scale, part_opt);
    } else {
      r = integrate_finite(f, lo, hi, part_opt);
    }
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace leakage::quadrature
