#pragma once

// Closed-form reference values used by the tests. Nothing here calls into
// the library; each oracle is an independent route to the same number.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

// Student-t CDF for one degree of freedom (Cauchy).
inline double t1_cdf(double t) { return 0.5 + std::atan(t) / std::numbers::pi; }

// Student-t CDF for two degrees of freedom.
inline double t2_cdf(double t) { return 0.5 + t / (2.0 * std::sqrt(2.0 + t * t)); }

inline double t2_quantile(double p) {
  const double a = 2.0 * p - 1.0;  // t / sqrt(2 + t^2)
  return a * std::sqrt(2.0 / (1.0 - a * a));
}

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double z) { return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2)); }

// Poisson CDF by direct pmf summation with the recurrence pmf(k) = pmf(k-1) * rate / k.
inline double poisson_cdf(double rate, int k) {
  double term = std::exp(-rate), sum = 0.0;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) term *= rate / i;
    sum += term;
  }
  return sum;
}

// CRPS of N(mu, sigma) at y.
inline double crps_normal(double mu, double sigma, double y) {
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * Phi(z) - 1.0) + 2.0 * phi(z) - 1.0 / std::sqrt(std::numbers::pi));
}

// KL(N(m1, s1) || N(m2, s2)).
inline double kl_normal(double m1, double s1, double m2, double s2) {
  return std::log(s2 / s1) + (s1 * s1 + (m1 - m2) * (m1 - m2)) / (2.0 * s2 * s2) - 0.5;
}

// Kolmogorov-Smirnov distance between sorted data and a CDF.
template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf F) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = F(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// OLS by explicit normal equations for at most two columns.
struct Ols2 {
  std::vector<double> beta;
  double s2;
};

inline Ols2 ols_normal_equations(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  const std::size_t n = y.size(), p = X.front().size();
  double a = 0, b = 0, c = 0, u = 0, v = 0;  // XtX = [[a,b],[b,c]], Xty = [u,v]
  for (std::size_t i = 0; i < n; ++i) {
    a += X[i][0] * X[i][0];
    u += X[i][0] * y[i];
    if (p == 2) {
      b += X[i][0] * X[i][1];
      c += X[i][1] * X[i][1];
      v += X[i][1] * y[i];
    }
  }
  std::vector<double> beta;
  if (p == 1) {
    beta = {u / a};
  } else {
    const double det = a * c - b * b;
    beta = {(c * u - b * v) / det, (a * v - b * u) / det};
  }
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0;
    for (std::size_t j = 0; j < p; ++j) fit += X[i][j] * beta[j];
    sse += (y[i] - fit) * (y[i] - fit);
  }
  return {beta, sse / static_cast<double>(n - p)};
}

}  // namespace oracle
