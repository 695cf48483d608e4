#pragma once

// Forecast calibration diagnostics over (predictive, observation) pairs.
// Probability calibration uses PIT values; exceedance and marginal
// calibration compare against the pooled empirical distribution of the
// observations. Scoring by CRPS, and a KL distance for elicited densities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "leakage/dataset.hpp"
#include "leakage/predictive.hpp"
#include "leakage/quadrature.hpp"
#include "leakage/random.hpp"

namespace leakage {

struct ForecastCase {
  PredictiveDistribution predictive;
  double observed = 0.0;
};

/// Probability integral transform. Discrete predictives get the randomized
/// version P(Y < y) + V * P(Y = y), with V drawn in case order from the seed.
inline std::vector<double> pit(std::span<const ForecastCase> cases, std::uint64_t seed) {
  if (cases.empty()) throw std::invalid_argument("pit: no forecast cases");
  Rng rng = make_rng(seed);
  std::vector<double> out;
  out.reserve(cases.size());
  for (const auto& c : cases) {
    if (!std::isfinite(c.observed)) throw std::invalid_argument("pit: observation is not finite");
    double u;
    if (c.predictive.kind() == Kind::continuous) {
      u = cdf(c.predictive, c.observed);
    } else {
      const double below = cdf_left(c.predictive, c.observed);
      const double mass = std::max(0.0, cdf(c.predictive, c.observed) - below);
      u = below + uniform_open01(rng) * mass;
    }
    out.push_back(std::clamp(u, 0.0, 1.0));
  }
  return out;
}

struct CurvePoint {
  double x = 0.0;
  double value = 0.0;
};

struct ProbabilityCurve {
  std::vector<CurvePoint> points;  // (level p, fraction of PIT values <= p)
  double max_deviation = 0.0;
};

inline std::vector<double> default_probability_levels() {
  std::vector<double> out;
  for (int k = 1; k <= 99; ++k) out.push_back(k / 100.0);
  return out;
}

inline ProbabilityCurve probability_calibration(std::span<const double> pits, std::vector<double> levels) {
  if (pits.empty()) throw std::invalid_argument("probability_calibration: no PIT values");
  for (double p : levels)
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability_calibration: levels must lie in (0, 1)");
  std::sort(levels.begin(), levels.end());
  std::vector<double> sorted(pits.begin(), pits.end());
  std::sort(sorted.begin(), sorted.end());
  ProbabilityCurve c;
  for (double p : levels) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), p) - sorted.begin();
    const double freq = static_cast<double>(count) / static_cast<double>(sorted.size());
    c.points.push_back({p, freq});
    c.max_deviation = std::max(c.max_deviation, std::abs(freq - p));
  }
  return c;
}

inline EmpiricalDistribution pooled_observations(std::span<const ForecastCase> cases) {
  if (cases.empty()) throw std::invalid_argument("no forecast cases");
  std::vector<double> ys;
  ys.reserve(cases.size());
  for (const auto& c : cases) ys.push_back(c.observed);
  return EmpiricalDistribution(std::move(ys));
}

/// For each y, the mean over cases of Qbar^-1(P_i(y)) where Qbar is the
/// pooled empirical distribution. Calibrated forecasts track the identity.
inline std::vector<CurvePoint> exceedance_calibration(std::span<const ForecastCase> cases, std::vector<double> ys) {
  const auto pooled = pooled_observations(cases);
  std::sort(ys.begin(), ys.end());
  std::vector<CurvePoint> out;
  out.reserve(ys.size());
  for (double y : ys) {
    double sum = 0.0;
    for (const auto& c : cases) sum += pooled.quantile(cdf(c.predictive, y));
    out.push_back({y, sum / static_cast<double>(cases.size())});
  }
  return out;
}

struct MarginalPoint {
  double y = 0.0;
  double mean_predictive_cdf = 0.0;
  double empirical_cdf = 0.0;
};

/// Mean predictive CDF against the pooled empirical CDF on a sorted grid.
/// With left_limits both are evaluated as P(Y < y).
inline std::vector<MarginalPoint> marginal_calibration(std::span<const ForecastCase> cases,
                                                       std::span<const double> grid, bool left_limits = false) {
  const auto pooled = pooled_observations(cases);
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("marginal_calibration: grid must be sorted");
  std::vector<MarginalPoint> out;
  out.reserve(grid.size());
  for (double y : grid) {
    double sum = 0.0;
    for (const auto& c : cases) sum += left_limits ? cdf_left(c.predictive, y) : cdf(c.predictive, y);
    out.push_back({y, sum / static_cast<double>(cases.size()), left_limits ? pooled.cdf_left(y) : pooled.cdf(y)});
  }
  return out;
}

inline double max_marginal_gap(std::span<const MarginalPoint> curve) {
  double gap = 0.0;
  for (const auto& m : curve) gap = std::max(gap, std::abs(m.mean_predictive_cdf - m.empirical_cdf));
  return gap;
}

/// 101 equally spaced quantiles of the pooled observations, duplicates removed.
inline std::vector<double> default_marginal_grid(std::span<const ForecastCase> cases) {
  const auto pooled = pooled_observations(cases);
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) {
    const double p = k / 100.0;
    grid.push_back(k == 0 ? pooled.min() : k == 100 ? pooled.max() : pooled.quantile(p));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Kolmogorov-Smirnov distance of a sample from Uniform(0, 1).
inline double ks_uniform(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("ks_uniform: empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = std::clamp(v[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic 5% critical value of the one-sample KS statistic.
inline double ks_critical_5pct(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }

namespace detail {

inline double crps_discrete(const PredictiveDistribution& d, double y) {
  // F is a step function: integrate (F(t) - 1{t >= y})^2 exactly between jumps.
  auto pts = atoms(d);
  std::vector<double> knots;
  knots.reserve(pts.size() + 1);
  for (const auto& a : pts) knots.push_back(a.first);
  knots.push_back(y);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double total = 0.0;
  double mass_below = 0.0;  // F on [knots[i], knots[i+1])
  std::size_t next_atom = 0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    while (next_atom < pts.size() && pts[next_atom].first <= knots[i]) mass_below += pts[next_atom++].second;
    const double step = knots[i] >= y ? 1.0 : 0.0;
    const double f = std::min(mass_below, 1.0);
    total += (f - step) * (f - step) * (knots[i + 1] - knots[i]);
  }
  return total;
}

}  // namespace detail

/// CRPS of a continuous distribution given by its CDF and survival
/// function, with no mass below support_lower.
template <class Cdf, class Sf>
double crps_from_cdf(Cdf F, Sf S, double y, double support_lower, std::vector<double> hints, double scale) {
  quadrature::Options opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-10;
  double total = 0.0;
  if (y > support_lower)
    total += quadrature::integrate([&](double t) { return F(t) * F(t); }, support_lower, y, hints, scale, opt).value;
  else if (std::isfinite(support_lower))
    total += support_lower - y;
  total += quadrature::integrate([&](double t) { return S(t) * S(t); }, std::max(y, support_lower), kInf, hints, scale,
                                 opt)
               .value;
  return std::max(0.0, total);
}

/// Continuous ranked probability score, integral of (F(t) - 1{t >= y})^2.
inline double crps(const PredictiveDistribution& d, double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("crps: observation is not finite");
  if (!has_finite_mean(d)) throw std::invalid_argument("CRPS undefined: infinite mean");
  if (d.kind() == Kind::discrete) return detail::crps_discrete(d, y);
  return crps_from_cdf([&](double t) { return cdf(d, t); }, [&](double t) { return sf(d, t); }, y, -kInf,
                       center_hints(d), spread_hint(d));
}

inline double mean_crps(std::span<const ForecastCase> cases) {
  if (cases.empty()) throw std::invalid_argument("mean_crps: no forecast cases");
  double s = 0.0;
  for (const auto& c : cases) s += crps(c.predictive, c.observed);
  return s / static_cast<double>(cases.size());
}

/// Piecewise-linear density through (x_k, f_k), zero outside [x_0, x_last].
class GridDensity {
 public:
  GridDensity(std::vector<double> xs, std::vector<double> fs) : xs_(std::move(xs)), fs_(std::move(fs)) {
    if (xs_.size() < 2 || xs_.size() != fs_.size())
      throw std::invalid_argument("grid density needs at least two knots and one value per knot");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i]) || !std::isfinite(fs_[i]) || fs_[i] < 0.0)
        throw std::invalid_argument("grid density values must be finite and nonnegative");
      if (i && !(xs_[i] > xs_[i - 1])) throw std::invalid_argument("grid density knots must be strictly increasing");
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) total += 0.5 * (fs_[i] + fs_[i + 1]) * (xs_[i + 1] - xs_[i]);
    if (std::abs(total - 1.0) > 1e-6)
      throw std::invalid_argument("grid density integrates to " + format_real(total) + ", not 1");
  }

  double operator()(double x) const {
    if (!(x >= xs_.front() && x <= xs_.back())) return 0.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.end()) return fs_.back();
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return (1.0 - w) * fs_[i] + w * fs_[i + 1];
  }

  const std::vector<double>& knots() const { return xs_; }

 private:
  std::vector<double> xs_;
  std::vector<double> fs_;
};

/// A continuous density given either on a grid or by an analytic family.
using ElicitedDensity = std::variant<GridDensity, PredictiveDistribution>;

namespace detail {

inline void require_continuous(const ElicitedDensity& e) {
  if (const auto* d = std::get_if<PredictiveDistribution>(&e); d && d->kind() != Kind::continuous)
    throw std::invalid_argument("kl_distance: both densities must be continuous");
}

inline double log_density_of(const ElicitedDensity& e, double x) {
  if (const auto* g = std::get_if<GridDensity>(&e)) {
    const double v = (*g)(x);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  }
  return log_density(std::get<PredictiveDistribution>(e), x);
}

inline std::vector<double> breakpoints_of(const ElicitedDensity& e) {
  if (const auto* g = std::get_if<GridDensity>(&e)) return g->knots();
  return center_hints(std::get<PredictiveDistribution>(e));
}

}  // namespace detail

/// Kullback-Leibler divergence of dist from the elicited density,
/// integral of q log(q / p) over {q > 0}. Infinite when p vanishes on a
/// q-positive set of positive length.
inline double kl_distance(const ElicitedDensity& elicited, const ElicitedDensity& dist) {
  detail::require_continuous(elicited);
  detail::require_continuous(dist);

  double lo = -kInf, hi = kInf, scale = 1.0;
  if (const auto* g = std::get_if<GridDensity>(&elicited)) {
    lo = g->knots().front();
    hi = g->knots().back();
    scale = hi - lo;
  } else {
    scale = spread_hint(std::get<PredictiveDistribution>(elicited));
  }
  std::vector<double> breaks = detail::breakpoints_of(elicited);
  const auto more = detail::breakpoints_of(dist);
  breaks.insert(breaks.end(), more.begin(), more.end());

  // Only grids have zero regions. Both are linear between merged knots, so
  // the sign at each midpoint decides the whole piece.
  if (std::holds_alternative<GridDensity>(dist)) {
    std::vector<double> knots = breaks;
    if (std::isfinite(lo)) knots.push_back(lo);
    if (std::isfinite(hi)) knots.push_back(hi);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const auto& p_grid = std::get<GridDensity>(dist);
    auto q_positive = [&](double x) { return std::isfinite(detail::log_density_of(elicited, x)); };
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double mid = 0.5 * (knots[i] + knots[i + 1]);
      if (mid < lo || mid > hi) continue;
      if (q_positive(mid) && !(p_grid(mid) > 0.0)) return kInf;
    }
    // Unbounded elicited support always reaches beyond a grid.
    if (!std::isfinite(lo) || !std::isfinite(hi)) return kInf;
  }

  auto integrand = [&](double x) {
    const double lq = detail::log_density_of(elicited, x);
    if (!std::isfinite(lq)) return 0.0;
    const double lp = detail::log_density_of(dist, x);
    if (lq == lp) return 0.0;
    return std::exp(lq) * (lq - lp);
  };
  quadrature::Options opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-10;
  auto r = quadrature::integrate(integrand, lo, hi, breaks, scale, opt);
  if (std::isnan(r.value)) return kInf;
  return std::max(0.0, r.value);
}

struct CalibrationReport {
  std::vector<double> pit_values;
  std::vector<CurvePoint> probability_curve;
  std::vector<CurvePoint> exceedance_curve;
  std::vector<MarginalPoint> marginal_curve;
  double max_probability_deviation = 0.0;
  double pit_ks_statistic = 0.0;
  double max_marginal_gap = 0.0;
  std::optional<double> mean_crps;  // absent when some predictive has no finite mean
  std::uint64_t seed = 0;
};

inline CalibrationReport calibration_report(std::span<const ForecastCase> cases, std::uint64_t seed) {
  CalibrationReport r;
  r.seed = seed;
  r.pit_values = pit(cases, seed);
  auto prob = probability_calibration(r.pit_values, default_probability_levels());
  r.probability_curve = std::move(prob.points);
  r.max_probability_deviation = prob.max_deviation;
  r.pit_ks_statistic = ks_uniform(r.pit_values);
  const auto grid = default_marginal_grid(cases);
  r.exceedance_curve = exceedance_calibration(cases, grid);
  r.marginal_curve = marginal_calibration(cases, grid);
  r.max_marginal_gap = max_marginal_gap(r.marginal_curve);
  if (std::all_of(cases.begin(), cases.end(), [](const ForecastCase& c) { return has_finite_mean(c.predictive); }))
    r.mean_crps = mean_crps(cases);
  return r;
}

inline void to_json(nlohmann::json& j, const CurvePoint& p) { j = nlohmann::json::array({p.x, p.value}); }

inline void to_json(nlohmann::json& j, const MarginalPoint& p) {
  j = nlohmann::json::array({p.y, p.mean_predictive_cdf, p.empirical_cdf});
}

inline void to_json(nlohmann::json& j, const CalibrationReport& r) {
  j = {{"n", r.pit_values.size()},
       {"seed", r.seed},
       {"pit_values", r.pit_values},
       {"pit_ks_statistic", r.pit_ks_statistic},
       {"pit_ks_critical_5pct", ks_critical_5pct(r.pit_values.size())},
       {"probability_curve", r.probability_curve},
       {"exceedance_curve", r.exceedance_curve},
       {"marginal_curve", r.marginal_curve},
       {"max_probability_deviation", r.max_probability_deviation},
       {"max_marginal_gap", r.max_marginal_gap}};
  j["mean_crps"] = r.mean_crps ? nlohmann::json(*r.mean_crps) : nlohmann::json(nullptr);
}

inline void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve, const std::string& x_name,
                            const std::string& value_name) {
  out << x_name << ',' << value_name << '\n';
  for (const auto& p : curve) out << format_real(p.x) << ',' << format_real(p.value) << '\n';
}

inline void write_curve_csv(std::ostream& out, std::span<const MarginalPoint> curve) {
  out << "y,mean_predictive_cdf,empirical_cdf\n";
  for (const auto& p : curve)
    out << format_real(p.y) << ',' << format_real(p.mean_predictive_cdf) << ',' << format_real(p.empirical_cdf) << '\n';
}

}  // namespace leakage
