#pragma once

// Predictive distributions: normal, Student-t, Poisson, finite empirical
// (step CDF) and weighted mixtures of any of these. A mixture over a
// posterior ensemble is the sum over parameter points of the conditional
// predictive weighted by the posterior mass at that point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <nlohmann/json.hpp>

#include "leakage/random.hpp"

namespace leakage {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { continuous, discrete };
enum class Family { normal, student_t, poisson, mixture, empirical };

inline const char* to_string(Kind k) { return k == Kind::continuous ? "continuous" : "discrete"; }

inline const char* to_string(Family f) {
  switch (f) {
    case Family::normal: return "normal";
    case Family::student_t: return "student_t";
    case Family::poisson: return "poisson";
    case Family::mixture: return "mixture";
    case Family::empirical: return "empirical";
  }
  return "unknown";
}

struct NormalParams {
  double mean = 0.0;
  double sd = 1.0;
};

struct StudentTParams {
  double df = 1.0;
  double location = 0.0;
  double scale = 1.0;
};

struct PoissonParams {
  double rate = 1.0;
};

/// Step-function distribution of a finite sample. CDF jumps are multiples of 1/n.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> observations) : obs_(std::move(observations)) {
    if (obs_.empty()) throw std::invalid_argument("empirical distribution needs at least one observation");
    for (double v : obs_)
      if (!std::isfinite(v)) throw std::invalid_argument("empirical distribution needs finite observations");
    std::sort(obs_.begin(), obs_.end());
  }

  std::span<const double> observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  double min() const { return obs_.front(); }
  double max() const { return obs_.back(); }

  double cdf(double y) const { return fraction(std::upper_bound(obs_.begin(), obs_.end(), y) - obs_.begin()); }
  double cdf_left(double y) const { return fraction(std::lower_bound(obs_.begin(), obs_.end(), y) - obs_.begin()); }
  double sf(double y) const { return fraction(obs_.end() - std::upper_bound(obs_.begin(), obs_.end(), y)); }
  double sf_left(double y) const { return fraction(obs_.end() - std::lower_bound(obs_.begin(), obs_.end(), y)); }
  double pmf(double y) const {
    auto [lo, hi] = std::equal_range(obs_.begin(), obs_.end(), y);
    return fraction(hi - lo);
  }

  /// Smallest observation whose CDF is at least p. Levels at or below 0 map
  /// to the minimum, levels at or above 1 to the maximum.
  double quantile(double p) const {
    const std::size_t n = obs_.size();
    if (!(p > 0.0)) return obs_.front();
    if (p >= 1.0) return obs_.back();
    // Smallest k in [1, n] with k / n >= p, computed without rounding surprises.
    std::size_t lo = 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (static_cast<double>(mid) / static_cast<double>(n) >= p)
        hi = mid;
      else
        lo = mid + 1;
    }
    return obs_[lo - 1];
  }

  std::vector<std::pair<double, double>> atoms() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < obs_.size();) {
      std::size_t j = i;
      while (j < obs_.size() && obs_[j] == obs_[i]) ++j;
      out.emplace_back(obs_[i], fraction(static_cast<std::ptrdiff_t>(j - i)));
      i = j;
    }
    return out;
  }

 private:
  double fraction(std::ptrdiff_t count) const {
    return static_cast<double>(count) / static_cast<double>(obs_.size());
  }

  std::vector<double> obs_;
};

class PredictiveDistribution;

struct MixtureParams {
  std::vector<PredictiveDistribution> components;
  std::vector<double> weights;
};

/// Immutable value type; copies share nothing mutable and are safe across threads.
class PredictiveDistribution {
 public:
  // Alternative order matches Family.
  using Params = std::variant<NormalParams, StudentTParams, PoissonParams, MixtureParams, EmpiricalDistribution>;

  static PredictiveDistribution normal(double mean, double sd) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd))
      throw std::invalid_argument("normal: need finite mean and sd > 0");
    return {NormalParams{mean, sd}, Kind::continuous};
  }

  static PredictiveDistribution student_t(const StudentTParams& t) {
    if (!(t.df > 0.0) || !std::isfinite(t.location) || !(t.scale > 0.0) || !std::isfinite(t.scale))
      throw std::invalid_argument("student_t: need df > 0, finite location, scale > 0");
    return {t, Kind::continuous};
  }

  static PredictiveDistribution student_t(double df, double location, double scale) {
    return student_t(StudentTParams{df, location, scale});
  }

  static PredictiveDistribution poisson(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("poisson: need rate > 0");
    return {PoissonParams{rate}, Kind::discrete};
  }

  static PredictiveDistribution empirical(std::vector<double> observations) {
    return {EmpiricalDistribution(std::move(observations)), Kind::discrete};
  }

  static PredictiveDistribution point_mass(double value) { return empirical({value}); }

  /// Weighted sum of component distributions. Weights must be nonnegative
  /// and sum to one within 1e-12; all components must share one kind.
  static PredictiveDistribution mixture(std::vector<PredictiveDistribution> components,
                                        std::vector<double> weights) {
    if (components.empty()) throw std::invalid_argument("mixture: empty ensemble");
    if (components.size() != weights.size())
      throw std::invalid_argument("mixture: component and weight counts differ");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("mixture: weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
    const Kind kind = components.front().kind();
    for (const auto& c : components)
      if (c.kind() != kind) throw std::invalid_argument("mixture: continuous and discrete components cannot be mixed");
    return {MixtureParams{std::move(components), std::move(weights)}, kind};
  }

  Kind kind() const { return kind_; }
  Family family() const { return static_cast<Family>(params_.index()); }
  const Params& params() const { return params_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&params_);
  }

 private:
  PredictiveDistribution(Params params, Kind kind) : params_(std::move(params)), kind_(kind) {}

  Params params_;
  Kind kind_;
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Evaluate in double; the default policy promotes to long double, which is
// several times slower.
using math_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
using students_t = boost::math::students_t_distribution<double, math_policy>;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }
inline double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p, math_policy{}); }

// Counts beyond this are treated as carrying no mass (tail below 1e-300).
inline double poisson_horizon(double rate) { return rate + 60.0 * std::sqrt(rate) + 800.0; }

inline double poisson_cdf_at(double rate, double k) {  // P(Y <= k), k integer
  if (k < 0.0) return 0.0;
  if (k > poisson_horizon(rate)) return 1.0;
  return boost::math::gamma_q(k + 1.0, rate);
}

inline double poisson_sf_at(double rate, double k) {  // P(Y > k), k integer
  if (k < 0.0) return 1.0;
  if (k > poisson_horizon(rate)) return 0.0;
  return boost::math::gamma_p(k + 1.0, rate);
}

inline double poisson_pmf(double rate, double y) {
  if (!(y >= 0.0) || y != std::floor(y)) return 0.0;
  if (y > poisson_horizon(rate)) return 0.0;
  return std::exp(y * std::log(rate) - rate - std::lgamma(y + 1.0));
}

inline double t_log_density(const StudentTParams& t, double y) {
  const double z = (y - t.location) / t.scale;
  const double nu = t.df;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi) -
         std::log(t.scale) - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

}  // namespace detail

/// P(Y <= y).
inline double cdf(const PredictiveDistribution& d, double y) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams& p) { return detail::normal_cdf((y - p.mean) / p.sd); },
          [&](const StudentTParams& p) {
            return boost::math::cdf(detail::students_t(p.df), (y - p.location) / p.scale);
          },
          [&](const PoissonParams& p) { return detail::poisson_cdf_at(p.rate, std::floor(y)); },
          [&](const MixtureParams& m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.components.size(); ++i) s += m.weights[i] * cdf(m.components[i], y);
            return std::min(s, 1.0);
          },
          [&](const EmpiricalDistribution& e) { return e.cdf(y); }},
      d.params());
}

/// P(Y < y); equals cdf for continuous distributions.
inline double cdf_left(const PredictiveDistribution& d, double y) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams&) { return cdf(d, y); }, [&](const StudentTParams&) { return cdf(d, y); },
          [&](const PoissonParams& p) { return detail::poisson_cdf_at(p.rate, std::ceil(y) - 1.0); },
          [&](const MixtureParams& m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.components.size(); ++i) s += m.weights[i] * cdf_left(m.components[i], y);
            return std::min(s, 1.0);
          },
          [&](const EmpiricalDistribution& e) { return e.cdf_left(y); }},
      d.params());
}

/// P(Y > y), computed directly so upper-tail probabilities keep relative accuracy.
inline double sf(const PredictiveDistribution& d, double y) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams& p) { return detail::normal_sf((y - p.mean) / p.sd); },
          [&](const StudentTParams& p) {
            return boost::math::cdf(
                boost::math::complement(detail::students_t(p.df), (y - p.location) / p.scale));
          },
          [&](const PoissonParams& p) { return detail::poisson_sf_at(p.rate, std::floor(y)); },
          [&](const MixtureParams& m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.components.size(); ++i) s += m.weights[i] * sf(m.components[i], y);
            return std::min(s, 1.0);
          },
          [&](const EmpiricalDistribution& e) { return e.sf(y); }},
      d.params());
}

/// P(Y >= y); equals sf for continuous distributions.
inline double sf_left(const PredictiveDistribution& d, double y) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams&) { return sf(d, y); }, [&](const StudentTParams&) { return sf(d, y); },
          [&](const PoissonParams& p) { return detail::poisson_sf_at(p.rate, std::ceil(y) - 1.0); },
          [&](const MixtureParams& m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.components.size(); ++i) s += m.weights[i] * sf_left(m.components[i], y);
            return std::min(s, 1.0);
          },
          [&](const EmpiricalDistribution& e) { return e.sf_left(y); }},
      d.params());
}

/// Density for continuous distributions, probability mass for discrete ones.
inline double density(const PredictiveDistribution& d, double y) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams& p) {
            const double z = (y - p.mean) / p.sd;
            return std::exp(-0.5 * z * z) / (p.sd * std::sqrt(2.0 * std::numbers::pi));
          },
          [&](const StudentTParams& p) { return std::exp(detail::t_log_density(p, y)); },
          [&](const PoissonParams& p) { return detail::poisson_pmf(p.rate, y); },
          [&](const MixtureParams& m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.components.size(); ++i) s += m.weights[i] * density(m.components[i], y);
            return s;
          },
          [&](const EmpiricalDistribution& e) { return e.pmf(y); }},
      d.params());
}

/// Log density (or log mass); -inf where the value is zero.
inline double log_density(const PredictiveDistribution& d, double y) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams& p) {
            const double z = (y - p.mean) / p.sd;
            return -0.5 * z * z - std::log(p.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
          },
          [&](const StudentTParams& p) { return detail::t_log_density(p, y); },
          [&](const MixtureParams& m) {
            std::vector<double> terms;
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m.components.size(); ++i) {
              if (m.weights[i] <= 0.0) continue;
              terms.push_back(std::log(m.weights[i]) + log_density(m.components[i], y));
              top = std::max(top, terms.back());
            }
            if (!std::isfinite(top)) return top;
            double s = 0.0;
            for (double t : terms) s += std::exp(t - top);
            return top + std::log(s);
          },
          [&](const auto&) { return std::log(density(d, y)); }},
      d.params());
}

/// True when Y = value has positive probability. Decided from the family's
/// support, never from numerical underflow of the mass.
inline bool has_atom(const PredictiveDistribution& d, double value) {
  if (!std::isfinite(value)) return false;
  return std::visit(
      detail::overloaded{[](const NormalParams&) { return false; }, [](const StudentTParams&) { return false; },
                         [&](const PoissonParams&) { return value >= 0.0 && value == std::floor(value); },
                         [&](const MixtureParams& m) {
                           for (std::size_t i = 0; i < m.components.size(); ++i)
                             if (m.weights[i] > 0.0 && has_atom(m.components[i], value)) return true;
                           return false;
                         },
                         [&](const EmpiricalDistribution& e) { return e.pmf(value) > 0.0; }},
      d.params());
}

/// True when the half-open interval [lo, hi) has positive probability,
/// decided structurally from the support.
inline bool has_mass_in(const PredictiveDistribution& d, double lo, double hi) {
  if (!(lo < hi)) return false;
  return std::visit(
      detail::overloaded{[](const NormalParams&) { return true; }, [](const StudentTParams&) { return true; },
                         [&](const PoissonParams&) { return std::ceil(std::max(lo, 0.0)) < hi; },
                         [&](const MixtureParams& m) {
                           for (std::size_t i = 0; i < m.components.size(); ++i)
                             if (m.weights[i] > 0.0 && has_mass_in(m.components[i], lo, hi)) return true;
                           return false;
                         },
                         [&](const EmpiricalDistribution& e) {
                           auto it = std::lower_bound(e.observations().begin(), e.observations().end(), lo);
                           return it != e.observations().end() && *it < hi;
                         }},
      d.params());
}

/// (value, mass) pairs of a discrete distribution in increasing order. Poisson
/// atoms whose mass is below 1e-300 are omitted.
inline std::vector<std::pair<double, double>> atoms(const PredictiveDistribution& d) {
  if (d.kind() != Kind::discrete) throw std::invalid_argument("atoms: distribution is continuous");
  return std::visit(
      detail::overloaded{
          [](const PoissonParams& p) {
            std::vector<std::pair<double, double>> out;
            const double last = std::floor(detail::poisson_horizon(p.rate));
            const double first = std::max(0.0, std::floor(p.rate - 60.0 * std::sqrt(p.rate) - 800.0));
            for (double k = first; k <= last; k += 1.0) {
              const double m = detail::poisson_pmf(p.rate, k);
              if (m > 0.0) out.emplace_back(k, m);
            }
            return out;
          },
          [](const EmpiricalDistribution& e) { return e.atoms(); },
          [](const MixtureParams& m) {
            std::map<double, double> merged;
            for (std::size_t i = 0; i < m.components.size(); ++i) {
              if (m.weights[i] <= 0.0) continue;
              for (const auto& [v, mass] : atoms(m.components[i])) merged[v] += m.weights[i] * mass;
            }
            return std::vector<std::pair<double, double>>(merged.begin(), merged.end());
          },
          [](const auto&) -> std::vector<std::pair<double, double>> { return {}; }},
      d.params());
}

/// Whether E|Y| is finite.
inline bool has_finite_mean(const PredictiveDistribution& d) {
  return std::visit(detail::overloaded{[](const StudentTParams& p) { return p.df > 1.0; },
                                       [](const MixtureParams& m) {
                                         return std::all_of(m.components.begin(), m.components.end(),
                                                            [](const auto& c) { return has_finite_mean(c); });
                                       },
                                       [](const auto&) { return true; }},
                    d.params());
}

/// Representative locations (modes/centers) used to place quadrature breakpoints.
inline std::vector<double> center_hints(const PredictiveDistribution& d) {
  return std::visit(detail::overloaded{[](const NormalParams& p) { return std::vector<double>{p.mean}; },
                                       [](const StudentTParams& p) { return std::vector<double>{p.location}; },
                                       [](const PoissonParams& p) { return std::vector<double>{p.rate}; },
                                       [](const MixtureParams& m) {
                                         std::vector<double> out;
                                         for (const auto& c : m.components) {
                                           auto h = center_hints(c);
                                           out.insert(out.end(), h.begin(), h.end());
                                         }
                                         return out;
                                       },
                                       [](const EmpiricalDistribution& e) {
                                         return std::vector<double>{e.min(), e.max()};
                                       }},
                    d.params());
}

/// A typical spread, used to scale quadrature maps and quantile brackets.
inline double spread_hint(const PredictiveDistribution& d) {
  return std::visit(detail::overloaded{[](const NormalParams& p) { return p.sd; },
                                       [](const StudentTParams& p) { return p.scale; },
                                       [](const PoissonParams& p) { return std::sqrt(p.rate) + 1.0; },
                                       [](const MixtureParams& m) {
                                         double s = 0.0;
                                         for (const auto& c : m.components) s = std::max(s, spread_hint(c));
                                         return s;
                                       },
                                       [](const EmpiricalDistribution& e) {
                                         return std::max(e.max() - e.min(), 1.0);
                                       }},
                    d.params());
}

namespace detail {

// Safeguarded Newton on cdf(x) = p inside a bracket [lo, hi] with
// cdf(lo) <= p <= cdf(hi); falls back to bisection when a step leaves it.
inline double solve_continuous_quantile(const PredictiveDistribution& d, double p, double guess, double lo,
                                        double hi) {
  double x = std::clamp(guess, lo, hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double fx = cdf(d, x) - p;
    if (std::abs(fx) <= 1e-15) return x;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(lo), std::abs(hi), 1e-300}))
      break;
    const double slope = density(d, x);
    double next = slope > 0.0 ? x - fx / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  // Prefer the endpoint whose CDF is closer to p.
  return std::abs(cdf(d, lo) - p) <= std::abs(cdf(d, hi) - p) ? lo : hi;
}

inline std::pair<double, double> expand_bracket(const PredictiveDistribution& d, double p, double guess) {
  double step = spread_hint(d);
  double lo = guess - step, hi = guess + step;
  for (int i = 0; i < 2000 && cdf(d, lo) > p; ++i) {
    step *= 2.0;
    lo = guess - step;
  }
  step = spread_hint(d);
  for (int i = 0; i < 2000 && cdf(d, hi) < p; ++i) {
    step *= 2.0;
    hi = guess + step;
  }
  return {lo, hi};
}

inline double poisson_quantile(double rate, double p) {
  double k = std::max(0.0, std::floor(rate + std::sqrt(rate) * normal_quantile(p)));
  while (poisson_cdf_at(rate, k) < p) k += 1.0;
  while (k > 0.0 && poisson_cdf_at(rate, k - 1.0) >= p) k -= 1.0;
  return k;
}

}  // namespace detail

/// Left-continuous generalized inverse: the smallest y with cdf(y) >= p.
/// Continuous results satisfy |cdf(quantile(p)) - p| <= 1e-10.
inline double quantile(const PredictiveDistribution& d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: level must lie in (0, 1)");
  return std::visit(
      detail::overloaded{
          [&](const NormalParams& n) {
            const double guess = n.mean + n.sd * detail::normal_quantile(p);
            auto [lo, hi] = detail::expand_bracket(d, p, guess);
            return detail::solve_continuous_quantile(d, p, guess, lo, hi);
          },
          [&](const StudentTParams& t) {
            const double guess =
                t.location + t.scale * boost::math::quantile(detail::students_t(t.df), p);
            auto [lo, hi] = detail::expand_bracket(d, p, guess);
            return detail::solve_continuous_quantile(d, p, guess, lo, hi);
          },
          [&](const PoissonParams& q) { return detail::poisson_quantile(q.rate, p); },
          [&](const MixtureParams& m) {
            // The mixture quantile lies between the smallest and largest component quantiles.
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = 0; i < m.components.size(); ++i) {
              if (m.weights[i] <= 0.0) continue;
              const double q = quantile(m.components[i], p);
              lo = std::min(lo, q);
              hi = std::max(hi, q);
            }
            if (d.kind() == Kind::continuous) {
              if (lo == hi) return lo;
              return detail::solve_continuous_quantile(d, p, 0.5 * (lo + hi), lo, hi);
            }
            for (const auto& [value, mass] : atoms(d)) {
              if (value < lo) continue;
              if (cdf(d, value) >= p) return value;
            }
            return hi;
          },
          [&](const EmpiricalDistribution& e) { return e.quantile(p); }},
      d.params());
}

/// One draw from d using the caller's generator.
template <class URBG>
double draw(const PredictiveDistribution& d, URBG& rng) {
  return std::visit(
      detail::overloaded{
          [&](const NormalParams& p) { return boost::random::normal_distribution<double>(p.mean, p.sd)(rng); },
          [&](const StudentTParams& p) {
            return p.location + p.scale * boost::random::student_t_distribution<double>(p.df)(rng);
          },
          [&](const PoissonParams& p) {
            return static_cast<double>(boost::random::poisson_distribution<long long, double>(p.rate)(rng));
          },
          [&](const MixtureParams& m) {
            const double u = uniform_open01(rng);
            double acc = 0.0;
            std::size_t pick = m.components.size() - 1;
            for (std::size_t i = 0; i < m.components.size(); ++i) {
              acc += m.weights[i];
              if (u < acc) {
                pick = i;
                break;
              }
            }
            return draw(m.components[pick], rng);
          },
          [&](const EmpiricalDistribution& e) {
            boost::random::uniform_int_distribution<std::size_t> index(0, e.size() - 1);
            return e.observations()[index(rng)];
          }},
      d.params());
}

/// n draws from d; the generator is taken by value so the caller's copy is untouched.
inline std::vector<double> sample(const PredictiveDistribution& d, std::size_t n, Rng rng) {
  if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
  std::vector<double> out(n);
  for (auto& v : out) v = draw(d, rng);
  return out;
}

inline std::vector<double> sample(const PredictiveDistribution& d, std::size_t n, std::uint64_t seed) {
  return sample(d, n, make_rng(seed));
}

/// A weighted set of parameter points approximating a posterior.
struct PosteriorPoint {
  std::vector<double> theta;
  double weight = 0.0;
};

struct PosteriorEnsemble {
  std::vector<PosteriorPoint> points;
};

/// Posterior predictive as the ensemble-weighted mixture of kernel(theta_i).
template <class Kernel>
PredictiveDistribution mixture_predictive(const PosteriorEnsemble& ensemble, Kernel&& kernel) {
  if (ensemble.points.empty()) throw std::invalid_argument("mixture_predictive: empty ensemble");
  std::vector<PredictiveDistribution> components;
  std::vector<double> weights;
  components.reserve(ensemble.points.size());
  weights.reserve(ensemble.points.size());
  for (const auto& point : ensemble.points) {
    components.push_back(std::invoke(kernel, std::span<const double>(point.theta)));
    weights.push_back(point.weight);
  }
  return PredictiveDistribution::mixture(std::move(components), std::move(weights));
}

inline void to_json(nlohmann::json& j, const PredictiveDistribution& d) {
  j = nlohmann::json{{"family", to_string(d.family())}, {"kind", to_string(d.kind())}};
  std::visit(detail::overloaded{[&](const NormalParams& p) {
                                  j["mean"] = p.mean;
                                  j["sd"] = p.sd;
                                },
                                [&](const StudentTParams& p) {
                                  j["df"] = p.df;
                                  j["location"] = p.location;
                                  j["scale"] = p.scale;
                                },
                                [&](const PoissonParams& p) { j["rate"] = p.rate; },
                                [&](const MixtureParams& m) {
                                  j["weights"] = m.weights;
                                  j["components"] = nlohmann::json::array();
                                  for (const auto& c : m.components) j["components"].push_back(c);
                                },
                                [&](const EmpiricalDistribution& e) {
                                  j["observations"] = std::vector<double>(e.observations().begin(),
                                                                          e.observations().end());
                                }},
             d.params());
}

}  // namespace leakage
