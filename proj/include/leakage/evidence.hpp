#pragma once

// Evidence E declares which values of the observable are possible. The
// leakage of a predictive P with respect to E is the mass P puts on values
// that E rules out: 0 is ideal, 1 means P and E do not overlap at all.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "leakage/dataset.hpp"
#include "leakage/error.hpp"
#include "leakage/predictive.hpp"
#include "leakage/regression.hpp"

namespace leakage {


struct Interval {
  double lower = -kInf;
  double upper = kInf;
  bool lower_open = false;
  bool upper_open = false;

  bool contains(double y) const {
    const bool above_lower = lower_open ? y > lower : y >= lower;
    const bool below_upper = upper_open ? y < upper : y <= upper;
    return above_lower && below_upper;
  }
};

/// Equally spaced values lower, lower + step, ... not exceeding upper (which may be +inf).
struct Lattice {
  double lower = 0.0;
  double upper = kInf;
  double step = 1.0;

  std::int64_t index_of(double y) const { return std::llround((y - lower) / step); }

  bool contains(double y) const {
    if (!(y >= lower - 1e-9 * step) || y > upper + 1e-9 * step) return false;
    const double k = std::round((y - lower) / step);
    return std::abs((y - lower) - k * step) <= 1e-9 * std::max(step, std::abs(y));
  }

  std::optional<std::size_t> count() const {
    if (std::isinf(upper)) return std::nullopt;
    return static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
  }
};

class Evidence {
 public:
  enum class Kind { continuous_support, discrete_support };

  /// Union of disjoint intervals, given in increasing order.
  static Evidence intervals(std::vector<Interval> parts, std::string description = {}) {
    if (parts.empty()) throw std::invalid_argument("evidence: at least one interval is required");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& iv = parts[i];
      if (std::isnan(iv.lower) || std::isnan(iv.upper) || iv.lower == kInf || iv.upper == -kInf)
        throw std::invalid_argument("evidence: invalid interval bounds");
      const bool degenerate = iv.lower == iv.upper && (iv.lower_open || iv.upper_open);
      if (iv.lower > iv.upper || degenerate) throw std::invalid_argument("evidence: empty interval");
      if (i > 0) {
        const auto& prev = parts[i - 1];
        const bool touching = prev.upper == iv.lower && !(prev.upper_open || iv.lower_open);
        if (prev.upper > iv.lower || touching)
          throw std::invalid_argument("evidence: intervals must be disjoint and ordered");
      }
    }
    Evidence e;
    e.kind_ = Kind::continuous_support;
    e.intervals_ = std::move(parts);
    e.description_ = std::move(description);
    return e;
  }

  static Evidence interval(double lower, double upper, std::string description = {}) {
    return intervals({Interval{lower, upper}}, std::move(description));
  }

  static Evidence unrestricted() { return interval(-kInf, kInf, "the whole real line"); }

  static Evidence lattice(double lower, double upper, double step, std::string description = {}) {
    if (!std::isfinite(lower) || std::isnan(upper) || !(step > 0.0) || !std::isfinite(step))
      throw std::invalid_argument("evidence: lattice needs finite lower bound and step > 0");
    if (upper < lower) throw std::invalid_argument("evidence: lattice has no values");
    Evidence e;
    e.kind_ = Kind::discrete_support;
    e.lattice_ = Lattice{lower, upper, step};
    e.description_ = std::move(description);
    return e;
  }

  static Evidence values(std::vector<double> vals, std::string description = {}) {
    if (vals.empty()) throw std::invalid_argument("evidence: at least one possible value is required");
    for (double v : vals)
      if (!std::isfinite(v)) throw std::invalid_argument("evidence: possible values must be finite");
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    Evidence e;
    e.kind_ = Kind::discrete_support;
    e.values_ = std::move(vals);
    e.description_ = std::move(description);
    return e;
  }

  Kind kind() const { return kind_; }
  bool is_continuous() const { return kind_ == Kind::continuous_support; }
  const std::vector<Interval>& interval_list() const { return intervals_; }
  const std::optional<Lattice>& lattice_spec() const { return lattice_; }
  const std::vector<double>& value_list() const { return values_; }
  const std::string& description() const { return description_; }
  Evidence with_description(std::string text) const {
    Evidence e = *this;
    e.description_ = std::move(text);
    return e;
  }

  bool contains(double y) const {
    if (!std::isfinite(y)) return false;
    if (kind_ == Kind::continuous_support)
      return std::any_of(intervals_.begin(), intervals_.end(), [&](const Interval& iv) { return iv.contains(y); });
    if (lattice_) return lattice_->contains(y);
    auto it = std::lower_bound(values_.begin(), values_.end(), y - 1e-9 * std::max(1.0, std::abs(y)));
    return it != values_.end() && std::abs(*it - y) <= 1e-9 * std::max(1.0, std::abs(y));
  }

  /// Possible values when there are finitely many of them.
  std::optional<std::vector<double>> enumerate() const {
    if (kind_ == Kind::continuous_support) return std::nullopt;
    if (!lattice_) return values_;
    auto count = lattice_->count();
    if (!count) return std::nullopt;
    std::vector<double> out(*count);
    for (std::size_t k = 0; k < *count; ++k) out[k] = lattice_->lower + static_cast<double>(k) * lattice_->step;
    return out;
  }

 private:
  Evidence() = default;

  Kind kind_ = Kind::continuous_support;
  std::vector<Interval> intervals_;
  std::optional<Lattice> lattice_;
  std::vector<double> values_;
  std::string description_;
};

/// Parses "[0,inf)", "(-inf,4]", "[0,1]U[2,3]", "lattice(0,inf,0.1)" or "{1,2,3}".
inline Evidence parse_support(std::string_view text) {
  auto fail = [&](const std::string& why) -> Evidence {
    throw std::invalid_argument("cannot parse support '" + std::string(text) + "': " + why);
  };
  auto strip = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto number = [&](std::string_view s) {
    s = strip(s);
    if (s == "inf" || s == "+inf" || s == "infinity" || s == "+infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
    double v = 0.0;
    if (!detail::parse_real(s, v)) fail("'" + std::string(s) + "' is not a number");
    return v;
  };
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i == s.size() || s[i] == sep) {
        out.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    }
    return out;
  };

  const std::string_view body = strip(text);
  if (body.empty()) return fail("empty");
  try {
    if (body.starts_with("lattice(") && body.ends_with(")")) {
      auto parts = split(body.substr(8, body.size() - 9), ',');
      if (parts.size() != 3) return fail("lattice needs (lower,upper,step)");
      return Evidence::lattice(number(parts[0]), number(parts[1]), number(parts[2]), std::string(body));
    }
    if (body.front() == '{' && body.back() == '}') {
      std::vector<double> vals;
      for (auto p : split(body.substr(1, body.size() - 2), ',')) vals.push_back(number(p));
      return Evidence::values(std::move(vals), std::string(body));
    }
    std::vector<Interval> parts;
    std::size_t pos = 0;
    while (pos < body.size()) {
      const auto close = body.find_first_of(")]", pos);
      if (close == std::string_view::npos) return fail("unterminated interval");
      const auto piece = strip(body.substr(pos, close + 1 - pos));
      if (piece.size() < 5 || (piece.front() != '[' && piece.front() != '(')) return fail("expected '[' or '('");
      auto bounds = split(piece.substr(1, piece.size() - 2), ',');
      if (bounds.size() != 2) return fail("interval needs two bounds");
      Interval iv{number(bounds[0]), number(bounds[1]), piece.front() == '(', piece.back() == ')'};
      // Infinite ends are open whatever bracket was written.
      if (std::isinf(iv.lower)) iv.lower_open = true;
      if (std::isinf(iv.upper)) iv.upper_open = true;
      parts.push_back(iv);
      pos = close + 1;
      while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
      if (pos < body.size()) {
        if (body[pos] != 'U' && body[pos] != 'u') return fail("intervals must be joined with 'U'");
        ++pos;
      }
    }
    return Evidence::intervals(std::move(parts), std::string(body));
  } catch (const std::invalid_argument& e) {
    if (std::string_view(e.what()).starts_with("cannot parse")) throw;
    return fail(e.what());
  }
}

namespace detail {

inline nlohmann::json bound_to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline double bound_from_json(const nlohmann::json& j) {
  if (j.is_null()) throw std::invalid_argument("evidence JSON: null bound");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    throw std::invalid_argument("evidence JSON: bad bound '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const Evidence& e) {
  using nlohmann::json;
  j = json::object();
  j["kind"] = e.is_continuous() ? "continuous_support" : "discrete_support";
  if (e.is_continuous()) {
    j["intervals"] = json::array();
    for (const auto& iv : e.interval_list()) {
      const bool closed_finite = !(iv.lower_open && std::isfinite(iv.lower)) && !(iv.upper_open && std::isfinite(iv.upper));
      if (closed_finite) {
        j["intervals"].push_back(json::array({detail::bound_to_json(iv.lower), detail::bound_to_json(iv.upper)}));
      } else {
        j["intervals"].push_back({{"lower", detail::bound_to_json(iv.lower)},
                                  {"upper", detail::bound_to_json(iv.upper)},
                                  {"lower_open", iv.lower_open},
                                  {"upper_open", iv.upper_open}});
      }
    }
  } else if (e.lattice_spec()) {
    const auto& l = *e.lattice_spec();
    j["lattice"] = {{"lower", l.lower}, {"upper", detail::bound_to_json(l.upper)}, {"step", l.step}};
  } else {
    j["values"] = e.value_list();
  }
  if (!e.description().empty()) j["description"] = e.description();
}

inline Evidence evidence_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("evidence JSON: expected object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const std::string description = j.value("description", std::string{});
  if (kind == "continuous_support") {
    std::vector<Interval> parts;
    for (const auto& item : j.at("intervals")) {
      Interval iv;
      if (item.is_array()) {
        if (item.size() != 2) throw std::invalid_argument("evidence JSON: interval must have two bounds");
        iv.lower = detail::bound_from_json(item[0]);
        iv.upper = detail::bound_from_json(item[1]);
      } else {
        iv.lower = detail::bound_from_json(item.at("lower"));
        iv.upper = detail::bound_from_json(item.at("upper"));
        iv.lower_open = item.value("lower_open", false);
        iv.upper_open = item.value("upper_open", false);
      }
      if (std::isinf(iv.lower)) iv.lower_open = true;
      if (std::isinf(iv.upper)) iv.upper_open = true;
      parts.push_back(iv);
    }
    return Evidence::intervals(std::move(parts), description);
  }
  if (kind == "discrete_support") {
    if (j.contains("lattice")) {
      const auto& l = j.at("lattice");
      return Evidence::lattice(l.at("lower").get<double>(), detail::bound_from_json(l.at("upper")),
                               l.at("step").get<double>(), description);
    }
    return Evidence::values(j.at("values").get<std::vector<double>>(), description);
  }
  throw std::invalid_argument("evidence JSON: unknown kind '" + kind + "'");
}

struct LeakageReport {
  double leakage = 0.0;
  double below_mass = 0.0;
  double above_mass = 0.0;
  double outside_mass_other = 0.0;
  Evidence evidence = Evidence::unrestricted();
  std::optional<CovariatePoint> x_star;
  bool complete = false;
};

namespace detail {

// P(Y below the interval) and P(Y above it), respecting open/closed ends.
inline std::pair<double, double> outside_interval(const PredictiveDistribution& d, const Interval& iv) {
  const double below = std::isinf(iv.lower) ? 0.0 : (iv.lower_open ? cdf(d, iv.lower) : cdf_left(d, iv.lower));
  const double above = std::isinf(iv.upper) ? 0.0 : (iv.upper_open ? sf_left(d, iv.upper) : sf(d, iv.upper));
  return {below, above};
}

inline bool interval_has_mass(const PredictiveDistribution& d, const Interval& iv) {
  if (d.kind() == Kind::continuous) return iv.lower < iv.upper;
  const double lo = iv.lower_open ? std::nextafter(iv.lower, kInf) : iv.lower;
  if (has_mass_in(d, lo, iv.upper)) return true;
  return !iv.upper_open && has_atom(d, iv.upper);
}

}  // namespace detail

/// Whether d gives positive probability to some value e allows, decided from
/// the supports rather than from computed masses.
inline bool overlaps(const PredictiveDistribution& d, const Evidence& e) {
  if (e.is_continuous()) {
    const auto& parts = e.interval_list();
    return std::any_of(parts.begin(), parts.end(), [&](const Interval& iv) { return detail::interval_has_mass(d, iv); });
  }
  if (d.kind() == Kind::continuous) return false;
  if (auto vals = e.enumerate())
    return std::any_of(vals->begin(), vals->end(), [&](double v) { return has_atom(d, v); });
  for (const auto& [value, mass] : atoms(d))
    if (e.contains(value)) return true;
  return false;
}

/// Mass the predictive puts outside the evidence's support.
inline LeakageReport leakage(const PredictiveDistribution& d, const Evidence& e) {
  LeakageReport r;
  r.evidence = e;
  if (d.kind() == Kind::continuous && !e.is_continuous()) {
    // A continuous predictive gives probability zero to every point of a discrete support.
    r.leakage = 1.0;
    r.outside_mass_other = 1.0;
    r.complete = true;
    return r;
  }
  if (e.is_continuous()) {
    const auto& parts = e.interval_list();
    if (parts.size() == 1) {
      auto [below, above] = detail::outside_interval(d, parts.front());
      r.below_mass = below;
      r.above_mass = above;
      r.leakage = std::clamp(below + above, 0.0, 1.0);
    } else {
      // Mass outside a union = sum of the gaps, each gap being "above piece k and below piece k+1".
      double outside = detail::outside_interval(d, Interval{parts.front().lower, kInf, parts.front().lower_open, true}).first;
      outside += detail::outside_interval(d, Interval{-kInf, parts.back().upper, true, parts.back().upper_open}).second;
      for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
        const Interval gap{parts[k].upper, parts[k + 1].lower, !parts[k].upper_open, !parts[k + 1].lower_open};
        if (gap.lower == gap.upper) {
          if (!gap.lower_open && !gap.upper_open) outside += density(d, gap.lower) * (d.kind() == Kind::discrete);
          continue;
        }
        auto [below_gap, above_gap] = detail::outside_interval(d, gap);
        outside += std::max(0.0, 1.0 - below_gap - above_gap);
      }
      r.outside_mass_other = std::clamp(outside, 0.0, 1.0);
      r.leakage = r.outside_mass_other;
    }
  } else {
    double inside = 0.0;
    for (const auto& [value, mass] : atoms(d))
      if (e.contains(value)) inside += mass;
    r.outside_mass_other = std::clamp(1.0 - inside, 0.0, 1.0);
    r.leakage = r.outside_mass_other;
  }
  if (!overlaps(d, e)) {
    r.complete = true;
    r.leakage = 1.0;
    if (!e.is_continuous() || e.interval_list().size() > 1) r.outside_mass_other = 1.0;
  }
  return r;
}

/// One report per grid point, in grid order.
inline std::vector<LeakageReport> leakage_profile(const FitResult& fit, const Evidence& e,
                                                  const std::vector<CovariatePoint>& grid) {
  std::vector<LeakageReport> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd x;
    try {
      x = fit.column_coding.encode(grid[i]);
    } catch (const DataError& err) {
      throw DataError("grid point " + std::to_string(i) + ": " + err.what());
    }
    auto report = leakage(predictive_at(fit, x), e);
    report.x_star = grid[i];
    out.push_back(std::move(report));
  }
  return out;
}

/// Leakage at the labelled reference points of the training data (one per
/// categorical level combination).
inline std::vector<std::pair<std::string, LeakageReport>> leakage_at_reference(const Dataset& data,
                                                                              const ModelSpec& spec,
                                                                              const FitResult& fit,
                                                                              const Evidence& e,
                                                                              ReferenceStatistic stat) {
  std::vector<std::pair<std::string, LeakageReport>> out;
  for (auto& [label, point] : reference_points(data, spec, stat)) {
    auto r = leakage(predictive_at(fit, point), e);
    r.x_star = point;
    out.emplace_back(label, std::move(r));
  }
  return out;
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
};

/// Fraction of seeded draws falling outside the evidence's support.
inline MonteCarloEstimate mc_leakage(const PredictiveDistribution& d, const Evidence& e, std::size_t n,
                                     std::uint64_t seed) {
  if (n < 10'000) throw std::invalid_argument("mc_leakage: need at least 10^4 draws");
  Rng rng = make_rng(seed);
  std::size_t outside = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!e.contains(draw(d, rng))) ++outside;
  MonteCarloEstimate m;
  m.draws = n;
  m.estimate = static_cast<double>(outside) / static_cast<double>(n);
  m.standard_error = std::sqrt(m.estimate * (1.0 - m.estimate) / static_cast<double>(n));
  return m;
}

inline nlohmann::json covariate_point_to_json(const CovariatePoint& point) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : point) {
    if (const double* v = std::get_if<double>(&value))
      j[name] = *v;
    else
      j[name] = std::get<std::string>(value);
  }
  return j;
}

inline CovariatePoint covariate_point_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("covariate point must be a JSON object");
  CovariatePoint p;
  for (const auto& [name, value] : j.items()) {
    if (value.is_number())
      p[name] = value.get<double>();
    else if (value.is_string())
      p[name] = value.get<std::string>();
    else
      throw std::invalid_argument("covariate '" + name + "' must be a number or a string");
  }
  return p;
}

inline void to_json(nlohmann::json& j, const LeakageReport& r) {
  j = {{"leakage", r.leakage},       {"below_mass", r.below_mass},
       {"above_mass", r.above_mass}, {"outside_mass_other", r.outside_mass_other},
       {"complete", r.complete},     {"evidence", r.evidence}};
  if (r.x_star) j["x_star"] = covariate_point_to_json(*r.x_star);
}

}  // namespace leakage
