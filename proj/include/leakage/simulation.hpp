#pragma once

// Synthetic data with a known lower support bound: truncated-normal linear
// regression, a two-location call-center-like generator, and the holdout
// experiment contrasting a leaky fitted model with the truncated truth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "leakage/calibration.hpp"
#include "leakage/dataset.hpp"
#include "leakage/evidence.hpp"
#include "leakage/predictive.hpp"
#include "leakage/random.hpp"
#include "leakage/regression.hpp"

namespace leakage {

/// Normal(mean, sd) conditioned on Y >= lower.
class TruncatedNormal {
 public:
  TruncatedNormal(double mean, double sd, double lower) : mean_(mean), sd_(sd), lower_(lower) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd) || std::isnan(lower) || lower == kInf)
      throw std::invalid_argument("truncated normal: invalid parameters");
    alpha_ = (lower - mean) / sd;
    kept_ = detail::normal_sf(alpha_);
    if (kept_ < 1e-12)
      throw std::invalid_argument("truncated normal: region above " + format_real(lower) + " has mass " +
                                  format_real(kept_) + " < 1e-12 (infeasible config)");
  }

  double lower() const { return lower_; }
  double kept_mass() const { return kept_; }

  double cdf(double y) const {
    if (y <= lower_) return 0.0;
    return std::clamp((detail::normal_cdf((y - mean_) / sd_) - detail::normal_cdf(alpha_)) / kept_, 0.0, 1.0);
  }

  double sf(double y) const {
    if (y <= lower_) return 1.0;
    return std::clamp(detail::normal_sf((y - mean_) / sd_) / kept_, 0.0, 1.0);
  }

  /// Inversion through the upper tail: y = mean - sd * Phi^-1((1 - u) * P(Z > alpha)).
  double quantile_from_uniform(double u) const {
    const double y = mean_ - sd_ * detail::normal_quantile((1.0 - u) * kept_);
    return std::max(y, lower_);
  }

  template <class URBG>
  double draw(URBG& rng) const {
    return quantile_from_uniform(uniform_open01(rng));
  }

  double crps(double y) const {
    return crps_from_cdf([this](double t) { return cdf(t); }, [this](double t) { return sf(t); }, y, lower_,
                         {mean_, std::isfinite(lower_) ? lower_ : mean_}, sd_);
  }

 private:
  double mean_, sd_, lower_;
  double alpha_ = 0.0, kept_ = 1.0;
};

struct SimConfig {
  std::size_t n = 100;
  std::vector<double> coefficients;                       // intercept first, then one per covariate
  double noise_sd = 1.0;
  double support_lower = 0.0;                             // -inf disables truncation
  std::vector<std::pair<double, double>> covariate_ranges;  // covariates are named x1, x2, ...
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 4) throw std::invalid_argument("simulation config: n must be at least 4");
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw std::invalid_argument("simulation config: noise_sd must be > 0");
    if (covariate_ranges.empty()) throw std::invalid_argument("simulation config: covariate_ranges is empty");
    if (coefficients.size() != covariate_ranges.size() + 1)
      throw std::invalid_argument("simulation config: need an intercept plus one coefficient per covariate range");
    for (const auto& [lo, hi] : covariate_ranges)
      if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        throw std::invalid_argument("simulation config: covariate range must be finite with low <= high");
    if (std::isnan(support_lower) || support_lower == kInf)
      throw std::invalid_argument("simulation config: support_lower must be finite or -inf");
  }

  std::vector<std::string> covariate_names() const {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < covariate_ranges.size(); ++j) out.push_back("x" + std::to_string(j + 1));
    return out;
  }

  ModelSpec model_spec() const { return {"y", covariate_names(), true}; }
};

/// Uniform covariates, then y from the truncated normal at x'beta, row by row.
inline Dataset gen_truncated_regression(const SimConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed);
  const std::size_t k = cfg.covariate_ranges.size();
  std::vector<std::vector<double>> xs(k, std::vector<double>(cfg.n));
  std::vector<double> ys(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double mean = cfg.coefficients[0];
    for (std::size_t j = 0; j < k; ++j) {
      const auto [lo, hi] = cfg.covariate_ranges[j];
      xs[j][i] = lo + (hi - lo) * uniform_open01(rng);
      mean += cfg.coefficients[j + 1] * xs[j][i];
    }
    ys[i] = TruncatedNormal(mean, cfg.noise_sd, cfg.support_lower).draw(rng);
  }
  std::vector<Column> cols;
  const auto names = cfg.covariate_names();
  for (std::size_t j = 0; j < k; ++j) cols.push_back({names[j], NumericColumn{std::move(xs[j])}});
  cols.push_back({"y", NumericColumn{std::move(ys)}});
  return Dataset(std::move(cols));
}

/// Covariate mix and noise of one call-center location.
struct LocationProfile {
  double calls_shape_a = 1.0;  // calls = lo + (hi - lo) * Beta(calls_shape_a, calls_shape_b)
  double calls_shape_b = 1.0;
  double absentee_rate = 0.3;  // absentees = lo + Binomial(hi - lo, absentee_rate)
  double noise_sd = 2.0;
  double offset = 0.0;  // added to mean abandonment
};

/// Two help lines observed weekly. Abandonment (percent) rises with call
/// volume and staff absences; the locations differ in workload mix, noise and
/// a mean offset. Abandonment cannot be negative.
struct CallCenterConfig {
  std::size_t per_location_n = 52;
  std::pair<double, double> calls_range{110.0, 2995.0};
  std::pair<double, double> absentee_range{1.0, 14.0};
  double y_floor = 0.0;
  std::uint64_t seed = 20240607;

  // Mean abandonment = intercept + calls_effect * calls + absentee_effect * absentees + offset.
  // Defaults come from tools/tune_callcenter.
  double intercept = -13.04;
  double calls_effect = 0.004321;
  double absentee_effect = 2.488;
  LocationProfile location_a{0.6864, 0.5266, 0.3082, 1.968, 0.0};
  LocationProfile location_b{0.2312, 7.122, 0.1810, 5.944, 1.0};

  void validate() const {
    if (per_location_n < 1) throw std::invalid_argument("call center config: per_location_n must be positive");
    if (!(calls_range.first <= calls_range.second) || !(absentee_range.first <= absentee_range.second))
      throw std::invalid_argument("call center config: ranges must have low <= high");
    if (absentee_range.first != std::floor(absentee_range.first) ||
        absentee_range.second != std::floor(absentee_range.second))
      throw std::invalid_argument("call center config: absentee range must be integral");
    for (const auto* p : {&location_a, &location_b}) {
      if (!(p->noise_sd > 0.0)) throw std::invalid_argument("call center config: noise_sd must be > 0");
      if (!(p->calls_shape_a > 0.0) || !(p->calls_shape_b > 0.0))
        throw std::invalid_argument("call center config: calls shapes must be > 0");
      if (!(p->absentee_rate >= 0.0 && p->absentee_rate <= 1.0))
        throw std::invalid_argument("call center config: absentee_rate must lie in [0, 1]");
      if (!std::isfinite(p->offset)) throw std::invalid_argument("call center config: offset must be finite");
    }
  }

  static ModelSpec model_spec() { return {"abandonment", {"calls", "absentees", "location"}, true}; }
};

inline Dataset gen_callcenter_like(const CallCenterConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed);
  std::vector<double> y, calls, absentees;
  std::vector<std::string> location;
  const auto [c_lo, c_hi] = cfg.calls_range;
  const auto [a_lo, a_hi] = cfg.absentee_range;
  const auto trials = static_cast<int>(a_hi - a_lo);
  for (const auto& [loc, p] : {std::pair{"A", cfg.location_a}, std::pair{"B", cfg.location_b}}) {
    for (std::size_t i = 0; i < cfg.per_location_n; ++i) {
      const double beta = boost::math::ibeta_inv(p.calls_shape_a, p.calls_shape_b, uniform_open01(rng));
      const double c = std::clamp(std::round(c_lo + (c_hi - c_lo) * beta), c_lo, c_hi);
      double a = a_lo;
      for (int t = 0; t < trials; ++t) a += uniform_open01(rng) < p.absentee_rate ? 1.0 : 0.0;
      const double mean = cfg.intercept + cfg.calls_effect * c + cfg.absentee_effect * a + p.offset;
      y.push_back(TruncatedNormal(mean, p.noise_sd, cfg.y_floor).draw(rng));
      calls.push_back(c);
      absentees.push_back(a);
      location.emplace_back(loc);
    }
  }
  std::vector<Column> cols;
  cols.push_back({"abandonment", NumericColumn{std::move(y)}});
  cols.push_back({"calls", NumericColumn{std::move(calls)}});
  cols.push_back({"absentees", NumericColumn{std::move(absentees)}});
  cols.push_back({"location", make_categorical(location)});
  return Dataset(std::move(cols));
}

struct ImpossibilityReport {
  std::size_t n_fit = 0;
  std::size_t n_holdout = 0;
  double support_lower = 0.0;
  double ell_min = 0.0;   // smallest held-out leakage below the support bound
  double ell_mean = 0.0;
  std::optional<double> probe_level;           // ell_min / 2, absent without leakage
  std::optional<double> frequency_at_probe;
  std::optional<double> deviation_at_probe;
  ProbabilityCurve probability_curve;
  double pit_ks_statistic = 0.0;
  double pit_ks_critical = 0.0;
  bool pit_uniformity_rejected = false;
  std::optional<double> marginal_gap_at_bound;  // mean P_i(Y < bound) minus pooled Q(Y < bound)
  double mean_crps_model = 0.0;
  double mean_crps_oracle = 0.0;
};

/// Fits the flat-prior regression to the first half of a simulated data set
/// and scores the held-out second half against the support bound.
inline ImpossibilityReport impossibility_experiment(const SimConfig& cfg, std::vector<double> levels) {
  const Dataset data = gen_truncated_regression(cfg);
  const std::size_t n_fit = cfg.n / 2;
  const auto spec = cfg.model_spec();
  const Design all = build_design(data, spec);
  const auto p = all.X.cols();
  Design train = all;
  train.X = all.X.topRows(static_cast<Eigen::Index>(n_fit));
  train.y = all.y.head(static_cast<Eigen::Index>(n_fit));
  const FitResult f = fit(train);

  ImpossibilityReport r;
  r.n_fit = n_fit;
  r.n_holdout = cfg.n - n_fit;
  r.support_lower = cfg.support_lower;
  const Evidence e = Evidence::interval(cfg.support_lower, kInf);

  std::vector<ForecastCase> cases;
  cases.reserve(r.n_holdout);
  double crps_oracle = 0.0;
  r.ell_min = 1.0;
  for (std::size_t i = n_fit; i < cfg.n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd x = all.X.row(row).transpose();
    auto pred = predictive_at(f, x);
    const double ell = leakage::leakage(pred, e).leakage;
    r.ell_min = std::min(r.ell_min, ell);
    r.ell_mean += ell;
    double true_mean = cfg.coefficients[0];
    for (Eigen::Index j = 1; j < p; ++j) true_mean += cfg.coefficients[static_cast<std::size_t>(j)] * x(j);
    crps_oracle += TruncatedNormal(true_mean, cfg.noise_sd, cfg.support_lower).crps(all.y(row));
    cases.push_back({std::move(pred), all.y(row)});
  }
  const double m = static_cast<double>(r.n_holdout);
  r.ell_mean /= m;
  r.mean_crps_oracle = crps_oracle / m;
  r.mean_crps_model = mean_crps(cases);

  // Continuous predictives: the PIT draws no random numbers.
  const auto pits = pit(cases, 0);
  if (r.ell_min > 0.0) {
    r.probe_level = r.ell_min / 2.0;
    levels.push_back(*r.probe_level);
  }
  r.probability_curve = probability_calibration(pits, levels);
  if (r.probe_level) {
    const auto probe = probability_calibration(pits, {*r.probe_level});
    r.frequency_at_probe = probe.points[0].value;
    r.deviation_at_probe = probe.max_deviation;
  }
  r.pit_ks_statistic = ks_uniform(pits);
  r.pit_ks_critical = ks_critical_5pct(pits.size());
  r.pit_uniformity_rejected = r.pit_ks_statistic >= r.pit_ks_critical;
  if (std::isfinite(cfg.support_lower)) {
    const std::vector<double> bound = {cfg.support_lower};
    const auto gap = marginal_calibration(cases, bound, true);
    r.marginal_gap_at_bound = gap[0].mean_predictive_cdf - gap[0].empirical_cdf;
  }
  return r;
}

namespace detail {

inline double real_or_infinity(const nlohmann::json& j) {
  if (j.is_null()) return -kInf;
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return -kInf;
    if (s == "inf") return kInf;
  }
  throw std::invalid_argument("expected a number, \"inf\", \"-inf\" or null");
}

inline nlohmann::json infinity_or_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw std::invalid_argument("unknown config key '" + key + "'");
}

}  // namespace detail

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"n", "coefficients", "noise_sd", "support_lower", "covariate_ranges", "seed"});
  SimConfig c;
  try {
    c.n = j.at("n").get<std::size_t>();
    c.coefficients = j.at("coefficients").get<std::vector<double>>();
    c.noise_sd = j.at("noise_sd").get<double>();
    c.support_lower = j.contains("support_lower") ? detail::real_or_infinity(j.at("support_lower")) : -kInf;
    c.covariate_ranges = j.at("covariate_ranges").get<std::vector<std::pair<double, double>>>();
    detail::read_if(j, "seed", c.seed);
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("simulation config: ") + ex.what());
  }
  c.validate();
  return c;
}

inline void to_json(nlohmann::json& j, const SimConfig& c) {
  j = {{"n", c.n},
       {"coefficients", c.coefficients},
       {"noise_sd", c.noise_sd},
       {"support_lower", detail::infinity_or_real(c.support_lower)},
       {"covariate_ranges", c.covariate_ranges},
       {"seed", c.seed}};
}

inline LocationProfile location_profile_from_json(const nlohmann::json& j, LocationProfile p) {
  detail::reject_unknown_keys(j, {"calls_shape_a", "calls_shape_b", "absentee_rate", "noise_sd", "offset"});
  detail::read_if(j, "calls_shape_a", p.calls_shape_a);
  detail::read_if(j, "calls_shape_b", p.calls_shape_b);
  detail::read_if(j, "absentee_rate", p.absentee_rate);
  detail::read_if(j, "noise_sd", p.noise_sd);
  detail::read_if(j, "offset", p.offset);
  return p;
}

inline CallCenterConfig callcenter_config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"per_location_n", "calls_range", "absentee_range", "y_floor", "seed", "intercept",
                                  "calls_effect", "absentee_effect", "location_a", "location_b"});
  CallCenterConfig c;
  try {
    detail::read_if(j, "per_location_n", c.per_location_n);
    detail::read_if(j, "calls_range", c.calls_range);
    detail::read_if(j, "absentee_range", c.absentee_range);
    detail::read_if(j, "y_floor", c.y_floor);
    detail::read_if(j, "seed", c.seed);
    detail::read_if(j, "intercept", c.intercept);
    detail::read_if(j, "calls_effect", c.calls_effect);
    detail::read_if(j, "absentee_effect", c.absentee_effect);
    if (j.contains("location_a")) c.location_a = location_profile_from_json(j.at("location_a"), c.location_a);
    if (j.contains("location_b")) c.location_b = location_profile_from_json(j.at("location_b"), c.location_b);
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("call center config: ") + ex.what());
  }
  c.validate();
  return c;
}

inline void to_json(nlohmann::json& j, const LocationProfile& p) {
  j = {{"calls_shape_a", p.calls_shape_a},
       {"calls_shape_b", p.calls_shape_b},
       {"absentee_rate", p.absentee_rate},
       {"noise_sd", p.noise_sd},
       {"offset", p.offset}};
}

inline void to_json(nlohmann::json& j, const CallCenterConfig& c) {
  j = {{"per_location_n", c.per_location_n},
       {"calls_range", c.calls_range},
       {"absentee_range", c.absentee_range},
       {"y_floor", c.y_floor},
       {"seed", c.seed},
       {"intercept", c.intercept},
       {"calls_effect", c.calls_effect},
       {"absentee_effect", c.absentee_effect},
       {"location_a", c.location_a},
       {"location_b", c.location_b}};
}

inline void to_json(nlohmann::json& j, const ImpossibilityReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = {{"n_fit", r.n_fit},
       {"n_holdout", r.n_holdout},
       {"support_lower", detail::infinity_or_real(r.support_lower)},
       {"ell_min", r.ell_min},
       {"ell_mean", r.ell_mean},
       {"probe_level", opt(r.probe_level)},
       {"frequency_at_probe", opt(r.frequency_at_probe)},
       {"deviation_at_probe", opt(r.deviation_at_probe)},
       {"probability_curve", r.probability_curve.points},
       {"max_probability_deviation", r.probability_curve.max_deviation},
       {"pit_ks_statistic", r.pit_ks_statistic},
       {"pit_ks_critical_5pct", r.pit_ks_critical},
       {"pit_uniformity_rejected", r.pit_uniformity_rejected},
       {"marginal_gap_at_bound", opt(r.marginal_gap_at_bound)},
       {"mean_crps_model", r.mean_crps_model},
       {"mean_crps_oracle", r.mean_crps_oracle}};
}

}  // namespace leakage
