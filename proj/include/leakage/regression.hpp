#pragma once

// Normal linear regression under flat (improper) priors on the coefficients
// and log-variance. With the parameters integrated out, the predictive for a
// new covariate point x* is Student-t with n - p degrees of freedom,
// location x*'b and scale sqrt(s^2 (1 + x*'(X'X)^-1 x*)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "leakage/dataset.hpp"
#include "leakage/error.hpp"
#include "leakage/predictive.hpp"

namespace leakage {

using CovariateValue = std::variant<double, std::string>;
using CovariatePoint = std::map<std::string, CovariateValue, std::less<>>;

struct ModelSpec {
  std::string response;
  std::vector<std::string> covariates;  // empty: intercept-only ("null x") model
  bool intercept = true;
};

struct DesignColumn {
  enum class Role { intercept, numeric, indicator };
  Role role = Role::intercept;
  std::string covariate;
  std::string level;  // indicator columns only

  std::string label() const {
    switch (role) {
      case Role::intercept: return "(intercept)";
      case Role::numeric: return covariate;
      case Role::indicator: return covariate + "=" + level;
    }
    return {};
  }
};

/// How covariate values map onto design-matrix columns.
class ColumnCoding {
 public:
  std::vector<DesignColumn> columns;
  std::vector<std::string> covariates;                       // declared order
  std::map<std::string, std::vector<std::string>> levels;    // categorical covariates, baseline first

  std::size_t size() const { return columns.size(); }
  bool is_categorical(const std::string& name) const { return levels.count(name) > 0; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& c : columns) out.push_back(c.label());
    return out;
  }

  Eigen::VectorXd encode(const CovariatePoint& point) const {
    for (const auto& name : covariates)
      if (!point.count(name)) throw DataError("covariate point is missing '" + name + "'");
    for (const auto& [name, value] : point)
      if (std::find(covariates.begin(), covariates.end(), name) == covariates.end())
        throw DataError("covariate point names unknown covariate '" + name + "'");

    Eigen::VectorXd x(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto& col = columns[j];
      const auto idx = static_cast<Eigen::Index>(j);
      if (col.role == DesignColumn::Role::intercept) {
        x(idx) = 1.0;
        continue;
      }
      const auto& value = point.find(col.covariate)->second;
      if (col.role == DesignColumn::Role::numeric) {
        const double* v = std::get_if<double>(&value);
        if (!v) throw DataError("covariate '" + col.covariate + "' is numeric but was given a level");
        if (!std::isfinite(*v)) throw DataError("covariate '" + col.covariate + "' is not finite");
        x(idx) = *v;
      } else {
        const std::string* level = std::get_if<std::string>(&value);
        if (!level) throw DataError("covariate '" + col.covariate + "' is categorical but was given a number");
        x(idx) = (*level == col.level) ? 1.0 : 0.0;
      }
    }
    // Levels absent from training cannot be encoded.
    for (const auto& [name, lv] : levels) {
      const std::string* level = std::get_if<std::string>(&point.find(name)->second);
      if (level && std::find(lv.begin(), lv.end(), *level) == lv.end())
        throw DataError("covariate '" + name + "' has unseen level '" + *level + "'");
    }
    return x;
  }
};

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  ColumnCoding coding;
  std::string response;
};

/// Intercept first (if enabled); categorical covariates become indicator
/// columns for every level except the lexicographically smallest.
inline Design build_design(const Dataset& data, const ModelSpec& spec) {
  if (!data.has(spec.response)) throw DataError("response column '" + spec.response + "' not found");
  const Column& response = data.column(spec.response);
  if (!response.is_numeric()) throw DataError("response column '" + spec.response + "' is not numeric");
  std::set<std::string> seen;
  for (const auto& name : spec.covariates) {
    if (!seen.insert(name).second) throw DataError("covariate '" + name + "' listed twice");
    if (name == spec.response) throw DataError("covariate '" + name + "' is also the response");
    if (!data.has(name)) throw DataError("covariate column '" + name + "' not found");
  }

  Design d;
  d.response = spec.response;
  d.coding.covariates = spec.covariates;
  if (spec.intercept) d.coding.columns.push_back({DesignColumn::Role::intercept, {}, {}});
  for (const auto& name : spec.covariates) {
    const Column& col = data.column(name);
    if (col.is_numeric()) {
      d.coding.columns.push_back({DesignColumn::Role::numeric, name, {}});
    } else {
      const auto& lv = col.categorical().levels;
      d.coding.levels[name] = lv;
      for (std::size_t k = 1; k < lv.size(); ++k) d.coding.columns.push_back({DesignColumn::Role::indicator, name, lv[k]});
    }
  }
  if (d.coding.columns.empty()) throw DataError("design has no columns (no intercept and no covariates)");

  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto p = static_cast<Eigen::Index>(d.coding.size());
  d.X.resize(n, p);
  d.y = Eigen::Map<const Eigen::VectorXd>(response.numeric().values.data(), n);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& dc = d.coding.columns[static_cast<std::size_t>(j)];
    switch (dc.role) {
      case DesignColumn::Role::intercept: d.X.col(j).setOnes(); break;
      case DesignColumn::Role::numeric:
        d.X.col(j) = Eigen::Map<const Eigen::VectorXd>(data.column(dc.covariate).numeric().values.data(), n);
        break;
      case DesignColumn::Role::indicator: {
        const auto& cat = data.column(dc.covariate).categorical();
        for (Eigen::Index i = 0; i < n; ++i) d.X(i, j) = cat.at(static_cast<std::size_t>(i)) == dc.level ? 1.0 : 0.0;
        break;
      }
    }
  }
  return d;
}

/// Sufficient statistics of the flat-prior posterior.
struct FitResult {
  Eigen::VectorXd beta_hat;
  double s2 = 0.0;
  Eigen::MatrixXd xtx_inverse;
  std::size_t n = 0;
  std::size_t p = 0;
  ColumnCoding column_coding;
  std::string response;

  double residual_df() const { return static_cast<double>(n - p); }
};

/// Least squares by column-pivoted Householder QR. Columns whose pivot falls
/// below eps * max(n, p) * max|R_ii| count as dependent.
inline FitResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  if (static_cast<std::size_t>(y.size()) != n) throw DataError("response length differs from design rows");
  if (p == 0) throw DataError("design has no columns");
  if (n <= p)
    throw ModelError("posterior improper under flat prior: n = " + std::to_string(n) + " <= p = " + std::to_string(p));
  if (!X.allFinite() || !y.allFinite()) throw DataError("design or response contains non-finite values");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(n, p)));
  if (static_cast<std::size_t>(qr.rank()) < p)
    throw ModelError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " < " + std::to_string(p) +
                     ")");

  FitResult out;
  out.n = n;
  out.p = p;
  out.beta_hat = qr.solve(y);
  const Eigen::VectorXd residuals = y - X * out.beta_hat;
  // Residuals at rounding level relative to y are an exact fit.
  const double noise_floor = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(n, p)) * y.norm();
  const double sse = residuals.squaredNorm();
  out.s2 = sse <= noise_floor * noise_floor ? 0.0 : sse / static_cast<double>(n - p);

  // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'.
  const auto pi = static_cast<Eigen::Index>(p);
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(pi, pi).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(pi, pi));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  Eigen::MatrixXd inv = perm * inner * perm.transpose();
  out.xtx_inverse = 0.5 * (inv + inv.transpose());
  return out;
}

inline FitResult fit(const Design& design) {
  FitResult out = fit(design.X, design.y);
  out.column_coding = design.coding;
  out.response = design.response;
  return out;
}

inline FitResult fit(const Dataset& data, const ModelSpec& spec) { return fit(build_design(data, spec)); }

/// x*'(X'X)^-1 x*.
inline double leverage(const FitResult& f, const Eigen::VectorXd& x_star) {
  if (static_cast<std::size_t>(x_star.size()) != f.p)
    throw DataError("covariate vector has " + std::to_string(x_star.size()) + " entries, model has " +
                    std::to_string(f.p) + " columns");
  return std::max(0.0, x_star.dot(f.xtx_inverse * x_star));
}

inline PredictiveDistribution predictive_at(const FitResult& f, const Eigen::VectorXd& x_star) {
  const double h = leverage(f, x_star);
  if (!(f.s2 > 0.0)) throw ModelError("degenerate predictive: residual variance is zero");
  return PredictiveDistribution::student_t(f.residual_df(), x_star.dot(f.beta_hat), std::sqrt(f.s2 * (1.0 + h)));
}

inline PredictiveDistribution predictive_at(const FitResult& f, const CovariatePoint& point) {
  return predictive_at(f, f.column_coding.encode(point));
}

enum class ReferenceStatistic { median, minimum, maximum, mean };

/// Labelled covariate points with every numeric covariate at the chosen
/// training statistic. Categorical covariates have no median, so one point
/// is produced per level (per combination of levels when there are several).
inline std::vector<std::pair<std::string, CovariatePoint>> reference_points(const Dataset& data,
                                                                            const ModelSpec& spec,
                                                                            ReferenceStatistic stat) {
  CovariatePoint base;
  std::vector<std::string> categorical;
  for (const auto& name : spec.covariates) {
    const Column& col = data.column(name);
    if (!col.is_numeric()) {
      categorical.push_back(name);
      continue;
    }
    std::vector<double> v = col.numeric().values;
    if (v.empty()) throw DataError("column '" + name + "' is empty");
    std::sort(v.begin(), v.end());
    double value = 0.0;
    switch (stat) {
      case ReferenceStatistic::median: {
        const std::size_t m = v.size() / 2;
        value = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
        break;
      }
      case ReferenceStatistic::minimum: value = v.front(); break;
      case ReferenceStatistic::maximum: value = v.back(); break;
      case ReferenceStatistic::mean: {
        double s = 0.0;
        for (double x : v) s += x;
        value = s / static_cast<double>(v.size());
        break;
      }
    }
    base[name] = value;
  }

  std::vector<std::pair<std::string, CovariatePoint>> out{{"", base}};
  for (const auto& name : categorical) {
    std::vector<std::pair<std::string, CovariatePoint>> next;
    for (const auto& [label, point] : out) {
      for (const auto& level : data.column(name).categorical().levels) {
        auto p = point;
        p[name] = level;
        next.emplace_back(label.empty() ? name + "=" + level : label + "," + name + "=" + level, std::move(p));
      }
    }
    out = std::move(next);
  }
  if (out.size() == 1 && out.front().first.empty()) out.front().first = "all";
  return out;
}

}  // namespace leakage
