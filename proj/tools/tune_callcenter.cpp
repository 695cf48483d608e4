// Random local search for call-center generator parameters. Each candidate
// runs over many seeds; the fitted model's leakage at medians, minima and
// under the null model is compared with the target windows. The search
// starts from the current defaults and prints the best config as JSON.
//
//   tune_callcenter [--seeds N] [--iterations K] [--step s] [--search-seed x] [--start cfg.json] [--fix-offset]

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include <CLI11.hpp>

#include "leakage/evidence.hpp"
#include "leakage/simulation.hpp"

using namespace leakage;

namespace {

struct Window {
  double lo, hi, target;
};

// A at medians, B at medians, A at minima, B at minima, null model.
constexpr Window kWindows[5] = {{0.25, 0.50, 0.38}, {0.005, 0.06, 0.02}, {0.80, 1.0, 0.92}, {0.35, 0.65, 0.50},
                                {0.07, 0.15, 0.10}};

std::array<double, 5> audit(const CallCenterConfig& cfg) {
  const Dataset data = gen_callcenter_like(cfg);
  const auto spec = CallCenterConfig::model_spec();
  const auto f = fit(data, spec);
  const Evidence e = Evidence::interval(cfg.y_floor, kInf);
  std::array<double, 5> out{};
  for (const auto& [label, r] : leakage_at_reference(data, spec, f, e, ReferenceStatistic::median))
    out[label == "location=A" ? 0 : 1] = r.leakage;
  for (const auto& [label, r] : leakage_at_reference(data, spec, f, e, ReferenceStatistic::minimum))
    out[label == "location=A" ? 2 : 3] = r.leakage;
  const ModelSpec null_spec{spec.response, {}, true};
  out[4] = leakage_at_reference(data, null_spec, fit(data, null_spec), e, ReferenceStatistic::median)[0].second.leakage;
  return out;
}

bool passes(const std::array<double, 5>& v) {
  for (int k = 0; k < 5; ++k)
    if (v[k] < kWindows[k].lo || v[k] > kWindows[k].hi) return false;
  return true;
}

double probit_distance(double got, double target) {
  auto z = [](double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * std::clamp(p, 1e-9, 1.0 - 1e-9)); };
  return std::pow(z(got) - z(target), 2);
}

struct Score {
  double pass_rate = 0.0;
  double mean_miss = 0.0;
  bool better_than(const Score& o) const {
    return pass_rate != o.pass_rate ? pass_rate > o.pass_rate : mean_miss < o.mean_miss;
  }
};

Score score(CallCenterConfig cfg, int seeds) {
  Score s;
  int ok = 0;
  for (int k = 1; k <= seeds; ++k) {
    cfg.seed = static_cast<std::uint64_t>(k);
    try {
      const auto v = audit(cfg);
      ok += passes(v);
      for (int w = 0; w < 5; ++w) s.mean_miss += probit_distance(v[w], kWindows[w].target);
    } catch (const std::exception&) {
      s.mean_miss += 1e6;
    }
  }
  s.pass_rate = static_cast<double>(ok) / seeds;
  s.mean_miss /= seeds;
  return s;
}

// Parameters perturbed by the search, on scales where a unit step is comparable.
std::vector<double*> knobs(CallCenterConfig& c) {
  return {&c.intercept,           &c.calls_effect,          &c.absentee_effect,     &c.location_a.calls_shape_a,
          &c.location_a.calls_shape_b, &c.location_a.absentee_rate, &c.location_a.noise_sd, &c.location_b.calls_shape_a,
          &c.location_b.calls_shape_b, &c.location_b.absentee_rate, &c.location_b.noise_sd, &c.location_b.offset};
}
constexpr double kScale[12] = {1.0, 0.0005, 0.2, 0.1, 0.1, 0.03, 0.2, 0.1, 0.5, 0.03, 0.3, 0.3};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tune call-center generator parameters against the leakage windows"};
  int seeds = 100;
  int iterations = 200;
  double step = 1.0;
  std::uint64_t search_seed = 1;
  std::string start;
  bool fix_offset = false;
  app.add_option("--seeds", seeds, "seeds per candidate")->check(CLI::PositiveNumber);
  app.add_option("--iterations", iterations, "candidates to try")->check(CLI::NonNegativeNumber);
  app.add_option("--step", step, "perturbation size relative to the default scales")->check(CLI::PositiveNumber);
  app.add_option("--search-seed", search_seed, "seed of the search itself");
  app.add_option("--start", start, "JSON config to start from instead of the defaults")->check(CLI::ExistingFile);
  app.add_flag("--fix-offset", fix_offset, "keep the location B offset at its starting value");
  CLI11_PARSE(app, argc, argv);

  CallCenterConfig best;
  if (!start.empty()) best = callcenter_config_from_json(nlohmann::json::parse(std::ifstream(start)));
  Score best_score = score(best, seeds);
  std::fprintf(stderr, "start: pass %.3f miss %.3f\n", best_score.pass_rate, best_score.mean_miss);
  std::mt19937_64 gen(search_seed);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int it = 0; it < iterations; ++it) {
    CallCenterConfig cand = best;
    auto ks = knobs(cand);
    for (std::size_t k = 0; k + (fix_offset ? 1 : 0) < ks.size(); ++k) *ks[k] += step * kScale[k] * z(gen);
    cand.location_a.absentee_rate = std::clamp(cand.location_a.absentee_rate, 0.01, 0.99);
    cand.location_b.absentee_rate = std::clamp(cand.location_b.absentee_rate, 0.01, 0.99);
    for (auto* p : {&cand.location_a, &cand.location_b}) {
      p->calls_shape_a = std::max(p->calls_shape_a, 0.05);
      p->calls_shape_b = std::max(p->calls_shape_b, 0.05);
      p->noise_sd = std::max(p->noise_sd, 0.1);
    }
    const Score s = score(cand, seeds);
    if (s.better_than(best_score)) {
      best = cand;
      best_score = s;
      std::fprintf(stderr, "iter %d: pass %.3f miss %.3f\n", it, s.pass_rate, s.mean_miss);
    }
  }
  best.seed = CallCenterConfig{}.seed;
  const auto v = audit(best);
  std::fprintf(stderr, "best: pass %.3f miss %.3f; default seed %s [%.3f %.3f %.3f %.3f %.3f]\n", best_score.pass_rate,
               best_score.mean_miss, passes(v) ? "passes" : "fails", v[0], v[1], v[2], v[3], v[4]);
  std::cout << nlohmann::json(best).dump(2) << "\n";
  return 0;
}
