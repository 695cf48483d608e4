#pragma once

// Command-line front end. run() takes the arguments after the program name
// and writes documents to `out`, diagnostics to `err`.
//
// Exit codes: 0 success, 1 usage error, 2 data or model error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "leakage/calibration.hpp"
#include "leakage/dataset.hpp"
#include "leakage/error.hpp"
#include "leakage/evidence.hpp"
#include "leakage/falsification.hpp"
#include "leakage/regression.hpp"
#include "leakage/simulation.hpp"

#ifndef LEAKAGE_VERSION
#define LEAKAGE_VERSION "unknown"
#endif

namespace leakage::cli {

/// Seed used by randomized subcommands when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// Bad flags or arguments; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using nlohmann::json;

struct ModelArgs {
  std::string data;
  std::string response;
  std::vector<std::string> covariates;
  bool no_intercept = false;
};

inline void add_model_options(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--data", m.data, "CSV file with a header row")->required();
  sub->add_option("--response", m.response, "response column")->required();
  sub->add_option("--covariates", m.covariates, "comma-separated covariate columns (none: intercept-only model)")
      ->delimiter(',');
  sub->add_flag("--no-intercept", m.no_intercept, "fit without an intercept column");
}

struct Loaded {
  Dataset data;
  ModelSpec spec;
  FitResult fit;
};

inline Loaded load_and_fit(const ModelArgs& m) {
  Loaded l;
  l.data = load_dataset_file(m.data);
  l.spec = {m.response, m.covariates, !m.no_intercept};
  l.fit = fit(l.data, l.spec);
  return l;
}

inline json model_json(const ModelSpec& spec) {
  return {{"response", spec.response}, {"covariates", spec.covariates}, {"intercept", spec.intercept}};
}

inline json fit_summary(const ModelSpec& spec, const FitResult& f) {
  json coefs = json::array();
  const auto labels = f.column_coding.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    coefs.push_back({{"term", labels[j]},
                     {"estimate", f.beta_hat(k)},
                     {"std_error", std::sqrt(std::max(0.0, f.s2 * f.xtx_inverse(k, k)))}});
  }
  return {{"model", model_json(spec)}, {"n", f.n},   {"p", f.p}, {"residual_df", f.residual_df()},
          {"s2", f.s2},                {"coefficients", coefs}};
}

inline json labelled_reports(const std::vector<std::pair<std::string, LeakageReport>>& reports) {
  json out = json::array();
  for (const auto& [label, r] : reports) {
    json j = r;
    j["label"] = label;
    out.push_back(std::move(j));
  }
  return out;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write '" + path + "'");
  return f;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  if (!leakage::detail::parse_real(s, v)) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

inline std::vector<std::pair<std::string, LeakageReport>> leakage_at(const Loaded& l, const Evidence& e,
                                                                      const std::string& at) {
  if (at == "medians") return leakage_at_reference(l.data, l.spec, l.fit, e, ReferenceStatistic::median);
  if (at == "minima") return leakage_at_reference(l.data, l.spec, l.fit, e, ReferenceStatistic::minimum);
  if (at == "maxima") return leakage_at_reference(l.data, l.spec, l.fit, e, ReferenceStatistic::maximum);
  if (at == "means") return leakage_at_reference(l.data, l.spec, l.fit, e, ReferenceStatistic::mean);
  if (at.empty() || at.front() != '{') throw UsageError("--at must be medians, minima, maxima, means or a JSON object");
  const CovariatePoint point = covariate_point_from_json(json::parse(at));
  auto r = leakage(predictive_at(l.fit, point), e);
  r.x_star = point;
  return {{"point", std::move(r)}};
}

// Predictive and observed response for each row of `rows` under the design of `l`.
inline std::vector<ForecastCase> cases_for_rows(const FitResult& f, const Design& design,
                                                const std::vector<std::size_t>& rows) {
  std::vector<ForecastCase> cases;
  cases.reserve(rows.size());
  for (std::size_t i : rows) {
    const auto r = static_cast<Eigen::Index>(i);
    cases.push_back({predictive_at(f, Eigen::VectorXd(design.X.row(r).transpose())), design.y(r)});
  }
  return cases;
}

struct FalsifyArgs {
  std::string mode = "point";
  std::optional<double> resolution;
};

inline json falsify_rows(const FitResult& f, const Design& design, const FalsifyArgs& a) {
  const ObservationMode mode = parse_observation_mode(a.mode);
  if (mode == ObservationMode::interval_event && !a.resolution)
    throw UsageError("--mode interval requires --resolution");
  if (design.y.size() == 0) throw DataError("no observations to check");
  json witness = nullptr;
  for (Eigen::Index i = 0; i < design.y.size(); ++i) {
    const Observation obs{design.y(i), a.resolution};
    if (is_impossible(predictive_at(f, Eigen::VectorXd(design.X.row(i).transpose())), obs, mode)) {
      witness = {{"row", i}, {"value", obs.value}};
      break;
    }
  }
  return {{"mode", to_string(mode)},
          {"resolution", a.resolution ? json(*a.resolution) : json(nullptr)},
          {"n_observations", design.y.size()},
          {"falsified", !witness.is_null()},
          {"witness", witness}};
}

// Column suffix for a reference label: "location=A" -> "A", "a=x,b=y" -> "x_y", "all" -> "model".
inline std::string density_column(const std::string& label) {
  if (label == "all") return "density_model";
  std::string out = "density";
  for (const auto& part : split(label, ',')) {
    const auto eq = part.find('=');
    out += "_" + (eq == std::string::npos ? part : part.substr(eq + 1));
  }
  return out;
}

inline std::vector<double> finite_bounds(const Evidence& e) {
  std::vector<double> out;
  if (!e.is_continuous()) return out;
  for (const auto& iv : e.interval_list())
    for (double b : {iv.lower, iv.upper})
      if (std::isfinite(b)) out.push_back(b);
  return out;
}

struct Curves {
  std::vector<std::string> columns;
  std::vector<double> y;
  std::vector<std::vector<double>> densities;
  std::vector<int> marker;
};

// Density of each predictive on one strictly increasing grid: `points` evenly
// spaced values plus `points` quantiles of every predictive, so that each
// column is resolved where its mass lies. Support bounds are added as rows.
inline Curves density_curves(const std::vector<std::pair<std::string, PredictiveDistribution>>& preds,
                             const Evidence& e, std::size_t points) {
  double lo = kInf, hi = -kInf;
  for (const auto& [name, d] : preds) {
    lo = std::min(lo, quantile(d, 1e-7));
    hi = std::max(hi, quantile(d, 1.0 - 1e-7));
  }
  const auto bounds = finite_bounds(e);
  for (double b : bounds) {
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  std::vector<double> ys;
  for (std::size_t k = 0; k < points; ++k) ys.push_back(lo + (hi - lo) * static_cast<double>(k) / (points - 1.0));
  for (const auto& [name, d] : preds)
    for (std::size_t k = 1; k <= points; ++k) ys.push_back(quantile(d, static_cast<double>(k) / (points + 1.0)));
  ys.insert(ys.end(), bounds.begin(), bounds.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  Curves c;
  c.y = ys;
  for (const auto& [name, d] : preds) {
    c.columns.push_back(name);
    std::vector<double> col;
    col.reserve(ys.size());
    for (double y : ys) col.push_back(density(d, y));
    c.densities.push_back(std::move(col));
  }
  for (double y : ys) c.marker.push_back(std::find(bounds.begin(), bounds.end(), y) != bounds.end() ? 1 : 0);
  return c;
}

inline void write_curves(std::ostream& out, const Curves& c) {
  out << "y";
  for (const auto& name : c.columns) out << ',' << name;
  out << ",support_marker\n";
  for (std::size_t i = 0; i < c.y.size(); ++i) {
    out << format_real(c.y[i]);
    for (const auto& col : c.densities) out << ',' << format_real(col[i]);
    out << ',' << c.marker[i] << '\n';
  }
}

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

inline GridAxis parse_grid_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--grid expects name=lo:hi:count, got '" + text + "'");
  const auto parts = split(text.substr(eq + 1), ':');
  if (parts.size() != 3) throw UsageError("--grid expects name=lo:hi:count, got '" + text + "'");
  const double lo = parse_number(parts[0], "--grid"), hi = parse_number(parts[1], "--grid");
  const double count = parse_number(parts[2], "--grid");
  if (!(count >= 1.0) || count != std::floor(count) || count > 1e6) throw UsageError("--grid count must be a positive integer");
  if (!(lo <= hi)) throw UsageError("--grid needs lo <= hi");
  GridAxis axis{text.substr(0, eq), {}};
  const auto n = static_cast<std::size_t>(count);
  for (std::size_t k = 0; k < n; ++k)
    axis.values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
  return axis;
}

inline void write_profile_csv(std::ostream& out, const ModelSpec& spec, const std::vector<LeakageReport>& reports) {
  for (const auto& name : spec.covariates) out << name << ',';
  out << "leakage,below_mass,above_mass,complete\n";
  for (const auto& r : reports) {
    for (const auto& name : spec.covariates) {
      const auto& v = r.x_star->at(name);
      out << (std::holds_alternative<double>(v) ? format_real(std::get<double>(v)) : std::get<std::string>(v)) << ',';
    }
    out << format_real(r.leakage) << ',' << format_real(r.below_mass) << ',' << format_real(r.above_mass) << ','
        << (r.complete ? 1 : 0) << '\n';
  }
}

inline void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

inline json with_version(json doc) {
  doc["tool_version"] = LEAKAGE_VERSION;
  return doc;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::json;
  const bool json_errors = std::find(args.begin(), args.end(), "--json-errors") != args.end();
  auto fail = [&](int code, const std::string& message) {
    if (json_errors)
      err << json{{"error", message}, {"exit_code", code}}.dump() << '\n';
    else
      err << "error: " << message << '\n';
    return code;
  };

  CLI::App app{"Audit Bayesian predictive models for probability leakage"};
  app.name("leakage-audit");
  app.set_version_flag("--version", LEAKAGE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  bool json_errors_flag = false;
  app.add_flag("--json-errors", json_errors_flag, "report errors as a JSON object on the error stream");

  detail::ModelArgs m;
  std::string support, at = "medians", out_path, out_curves, observations, kind, config;
  std::vector<std::string> grid, fixes;
  detail::FalsifyArgs fal;
  double holdout = 0.5, resolution = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> seed_override;
  std::size_t points = 801;

  auto* fit_cmd = app.add_subcommand("fit", "fit the flat-prior regression and print its summary");
  detail::add_model_options(fit_cmd, m);

  auto* leak_cmd = app.add_subcommand("leak", "leakage of the predictive against a declared support");
  detail::add_model_options(leak_cmd, m);
  leak_cmd->add_option("--support", support, "support, e.g. \"[0,inf)\" or \"lattice(0,10,1)\"")->required();
  leak_cmd->add_option("--at", at, "medians, minima, maxima, means or a JSON covariate point")->capture_default_str();

  auto* profile_cmd = app.add_subcommand("leak-profile", "leakage over a covariate grid, as CSV");
  detail::add_model_options(profile_cmd, m);
  profile_cmd->add_option("--support", support, "support string")->required();
  profile_cmd->add_option("--grid", grid, "name=lo:hi:count (repeatable; cartesian product)")->required();
  profile_cmd->add_option("--fix", fixes, "name=value for a covariate held fixed (repeatable)");
  profile_cmd->add_option("--out", out_path, "CSV output file (default: standard output)");

  auto* falsify_cmd = app.add_subcommand("falsify", "check whether any observation was impossible under the model");
  detail::add_model_options(falsify_cmd, m);
  falsify_cmd->add_option("--mode", fal.mode, "point or interval")->capture_default_str()->check(CLI::IsMember({"point", "interval"}));
  auto* res_opt = falsify_cmd->add_option("--resolution", resolution, "measurement resolution for interval mode");
  falsify_cmd->add_option("--observations", observations, "CSV of new observations (default: the fitting data)");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "holdout calibration of the fitted model");
  detail::add_model_options(calibrate_cmd, m);
  calibrate_cmd->add_option("--holdout", holdout, "fraction of rows held out")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  calibrate_cmd->add_option("--seed", seed, "seed for the split and randomized PITs")->capture_default_str();
  calibrate_cmd->add_option("--out-curves", out_curves,
                            "prefix for curve CSVs (<prefix>probability.csv, exceedance.csv, marginal.csv)");

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic dataset as CSV");
  simulate_cmd->add_option("kind", kind, "truncated or callcenter")
      ->required()
      ->check(CLI::IsMember({"truncated", "callcenter"}));
  simulate_cmd->add_option("--config", config, "JSON config (required for truncated)");
  simulate_cmd->add_option("--out", out_path, "CSV output file (default: standard output)");
  simulate_cmd->add_option("--seed", seed_override, "override the config seed");

  auto* report_cmd = app.add_subcommand("report", "audit document plus predictive density curves");
  detail::add_model_options(report_cmd, m);
  report_cmd->add_option("--support", support, "support string")->required();
  report_cmd->add_option("--out-curves", out_curves, "CSV file for the density curves");
  report_cmd->add_option("--points", points, "evenly spaced curve points")->capture_default_str()->check(CLI::Range(2, 1000000));
  report_cmd->add_option("--seed", seed, "seed for randomized PITs")->capture_default_str();
  report_cmd->add_option("--mode", fal.mode, "falsification mode: point or interval")->capture_default_str()
      ->check(CLI::IsMember({"point", "interval"}));
  auto* report_res_opt = report_cmd->add_option("--resolution", resolution, "measurement resolution for interval mode");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return 0;
    }
    return fail(1, e.what());
  }
  if (*res_opt || *report_res_opt) fal.resolution = resolution;

  try {
    if (*fit_cmd) {
      const auto l = detail::load_and_fit(m);
      detail::emit(out, detail::with_version(detail::fit_summary(l.spec, l.fit)));
    } else if (*leak_cmd) {
      const Evidence e = parse_support(support);
      const auto l = detail::load_and_fit(m);
      const auto reports = detail::leakage_at(l, e, at);
      detail::emit(out, detail::with_version({{"model", detail::model_json(l.spec)},
                                              {"support", e},
                                              {"at", at.front() == '{' ? "point" : at},
                                              {"reports", detail::labelled_reports(reports)}}));
    } else if (*profile_cmd) {
      const Evidence e = parse_support(support);
      const auto l = detail::load_and_fit(m);
      std::vector<detail::GridAxis> axes;
      for (const auto& g : grid) axes.push_back(detail::parse_grid_axis(g));
      CovariatePoint fixed;
      std::set<std::string> named;
      auto claim = [&](const std::string& name) {
        if (std::find(l.spec.covariates.begin(), l.spec.covariates.end(), name) == l.spec.covariates.end())
          throw UsageError("'" + name + "' is not a covariate of the model");
        if (!named.insert(name).second) throw UsageError("covariate '" + name + "' given twice");
      };
      for (const auto& a : axes) {
        claim(a.name);
        if (!l.data.column(a.name).is_numeric()) throw UsageError("--grid covariate '" + a.name + "' is categorical");
      }
      for (const auto& f : fixes) {
        const auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--fix expects name=value, got '" + f + "'");
        const std::string name = f.substr(0, eq), value = f.substr(eq + 1);
        claim(name);
        if (l.data.column(name).is_numeric())
          fixed[name] = detail::parse_number(value, "--fix");
        else
          fixed[name] = value;
      }
      // Covariates neither gridded nor fixed sit at their training medians (each level for categoricals).
      ModelSpec rest{l.spec.response, {}, l.spec.intercept};
      for (const auto& name : l.spec.covariates)
        if (!named.count(name)) rest.covariates.push_back(name);
      std::vector<CovariatePoint> points_list;
      for (auto [label, base] : reference_points(l.data, rest, ReferenceStatistic::median)) {
        for (const auto& [name, v] : fixed) base[name] = v;
        std::vector<CovariatePoint> expanded{base};
        for (const auto& a : axes) {
          std::vector<CovariatePoint> next;
          for (const auto& p : expanded)
            for (double v : a.values) {
              auto q = p;
              q[a.name] = v;
              next.push_back(std::move(q));
            }
          expanded = std::move(next);
        }
        points_list.insert(points_list.end(), expanded.begin(), expanded.end());
      }
      const auto reports = leakage_profile(l.fit, e, points_list);
      if (out_path.empty()) {
        detail::write_profile_csv(out, l.spec, reports);
      } else {
        auto f = detail::open_output(out_path);
        detail::write_profile_csv(f, l.spec, reports);
      }
    } else if (*falsify_cmd) {
      const auto l = detail::load_and_fit(m);
      const Design design = observations.empty() ? build_design(l.data, l.spec)
                                                 : build_design(load_dataset_file(observations), l.spec);
      if (design.coding.labels() != l.fit.column_coding.labels())
        throw DataError("observations do not share the fitted model's columns (check categorical levels)");
      json doc = detail::falsify_rows(l.fit, design, fal);
      doc["model"] = detail::model_json(l.spec);
      detail::emit(out, detail::with_version(std::move(doc)));
    } else if (*calibrate_cmd) {
      if (!(holdout > 0.0 && holdout < 1.0)) throw UsageError("--holdout must lie strictly between 0 and 1");
      const Dataset data = load_dataset_file(m.data);
      const ModelSpec spec{m.response, m.covariates, !m.no_intercept};
      const Design design = build_design(data, spec);
      const std::size_t n = data.rows();
      const auto n_holdout = static_cast<std::size_t>(std::llround(holdout * static_cast<double>(n)));
      if (n_holdout < 1 || n_holdout >= n) throw DataError("holdout fraction leaves an empty fit or holdout set");
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      Rng rng = make_rng(seed);
      for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_open01(rng) * static_cast<double>(i))]);
      std::vector<std::size_t> fit_rows(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_holdout));
      std::vector<std::size_t> hold_rows(order.end() - static_cast<std::ptrdiff_t>(n_holdout), order.end());
      std::sort(fit_rows.begin(), fit_rows.end());
      std::sort(hold_rows.begin(), hold_rows.end());
      Eigen::MatrixXd X(static_cast<Eigen::Index>(fit_rows.size()), design.X.cols());
      Eigen::VectorXd y(X.rows());
      for (std::size_t k = 0; k < fit_rows.size(); ++k) {
        X.row(static_cast<Eigen::Index>(k)) = design.X.row(static_cast<Eigen::Index>(fit_rows[k]));
        y(static_cast<Eigen::Index>(k)) = design.y(static_cast<Eigen::Index>(fit_rows[k]));
      }
      FitResult f = fit(X, y);
      f.column_coding = design.coding;
      f.response = design.response;
      const auto cases = detail::cases_for_rows(f, design, hold_rows);
      const auto report = calibration_report(cases, seed);
      if (!out_curves.empty()) {
        auto p = detail::open_output(out_curves + "probability.csv");
        write_curve_csv(p, report.probability_curve, "p", "frequency");
        auto x = detail::open_output(out_curves + "exceedance.csv");
        write_curve_csv(x, report.exceedance_curve, "y", "mean_exceedance");
        auto g = detail::open_output(out_curves + "marginal.csv");
        write_curve_csv(g, report.marginal_curve);
      }
      detail::emit(out, detail::with_version({{"model", detail::model_json(spec)},
                                              {"holdout_fraction", holdout},
                                              {"n_fit", fit_rows.size()},
                                              {"n_holdout", hold_rows.size()},
                                              {"seed", seed},
                                              {"calibration", report}}));
    } else if (*simulate_cmd) {
      auto read_config = [&]() {
        std::ifstream in(config);
        if (!in) throw DataError("cannot open '" + config + "'");
        return json::parse(in);
      };
      Dataset data;
      if (kind == "truncated") {
        if (config.empty()) throw UsageError("simulate truncated requires --config");
        auto cfg = sim_config_from_json(read_config());
        if (seed_override) cfg.seed = *seed_override;
        data = gen_truncated_regression(cfg);
      } else {
        auto cfg = config.empty() ? CallCenterConfig{} : callcenter_config_from_json(read_config());
        if (seed_override) cfg.seed = *seed_override;
        data = gen_callcenter_like(cfg);
      }
      if (out_path.empty()) {
        write_csv(out, data);
      } else {
        auto f = detail::open_output(out_path);
        write_csv(f, data);
      }
    } else if (*report_cmd) {
      const Evidence e = parse_support(support);
      const auto l = detail::load_and_fit(m);
      const ModelSpec null_spec{l.spec.response, {}, true};
      const FitResult null_fit = fit(l.data, null_spec);
      const auto null_pred = predictive_at(null_fit, CovariatePoint{});
      auto null_report = leakage(null_pred, e);
      null_report.x_star = CovariatePoint{};

      std::vector<std::pair<std::string, PredictiveDistribution>> preds{{"density_null", null_pred}};
      for (const auto& [label, point] : reference_points(l.data, l.spec, ReferenceStatistic::median))
        preds.emplace_back(detail::density_column(label), predictive_at(l.fit, point));
      const auto curves = detail::density_curves(preds, e, points);
      if (!out_curves.empty()) {
        auto f = detail::open_output(out_curves);
        detail::write_curves(f, curves);
      }

      const Design design = build_design(l.data, l.spec);
      std::vector<std::size_t> all_rows(l.data.rows());
      for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
      const auto cal = calibration_report(detail::cases_for_rows(l.fit, design, all_rows), seed);
      json columns = json::array({"y"});
      for (const auto& c : curves.columns) columns.push_back(c);
      columns.push_back("support_marker");

      detail::emit(out, detail::with_version(
                            {{"seed", seed},
                             {"model", detail::fit_summary(l.spec, l.fit)},
                             {"support", e},
                             {"leakage",
                              {{"medians", detail::labelled_reports(detail::leakage_at(l, e, "medians"))},
                               {"minima", detail::labelled_reports(detail::leakage_at(l, e, "minima"))},
                               {"null_model", null_report}}},
                             {"falsification", detail::falsify_rows(l.fit, design, fal)},
                             {"calibration",
                              {{"sample", "in_sample"},
                               {"n", cal.pit_values.size()},
                               {"pit_ks_statistic", cal.pit_ks_statistic},
                               {"pit_ks_critical_5pct", ks_critical_5pct(cal.pit_values.size())},
                               {"max_probability_deviation", cal.max_probability_deviation},
                               {"max_marginal_gap", cal.max_marginal_gap},
                               {"mean_crps", cal.mean_crps ? json(*cal.mean_crps) : json(nullptr)}}},
                             {"curves",
                              {{"path", out_curves.empty() ? json(nullptr) : json(out_curves)},
                               {"columns", columns},
                               {"rows", curves.y.size()}}}}));
    }
  } catch (const UsageError& e) {
    return fail(1, e.what());
  } catch (const Error& e) {
    return fail(2, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, e.what());
  } catch (const json::exception& e) {
    return fail(2, std::string("JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(2, e.what());
  }
  return 0;
}

}  // namespace leakage::cli
