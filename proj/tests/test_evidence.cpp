#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "leakage/evidence.hpp"
#include "oracles.hpp"

using namespace leakage;

namespace {

const double kCauchyLeak = 0.5 + std::atan(-2.0 * std::numbers::sqrt2) / std::numbers::pi;

PredictiveDistribution hand_ols_predictive() {
  return PredictiveDistribution::student_t(1, 4.0 / 3.0, std::sqrt(2.0 / 9.0));
}

PredictiveDistribution random_distribution(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (gen() % 5) {
    case 0: return PredictiveDistribution::normal(-5 + 10 * u(gen), 0.1 + 3 * u(gen));
    case 1: return PredictiveDistribution::student_t(0.5 + 10 * u(gen), -5 + 10 * u(gen), 0.1 + 3 * u(gen));
    case 2: return PredictiveDistribution::poisson(0.1 + 10 * u(gen));
    case 3: return PredictiveDistribution::empirical({std::round(10 * u(gen)), std::round(10 * u(gen)), 3.0});
    default:
      return PredictiveDistribution::mixture(
          {PredictiveDistribution::normal(-2, 1), PredictiveDistribution::student_t(3, 2 + u(gen), 1)}, {0.4, 0.6});
  }
}

Evidence random_interval_evidence(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  double a = u(gen), b = u(gen);
  if (a > b) std::swap(a, b);
  if (gen() % 4 == 0) a = -kInf;
  if (gen() % 4 == 0) b = kInf;
  return Evidence::intervals({Interval{a, b, std::isinf(a), std::isinf(b)}});
}

}  // namespace

TEST(Leakage, NormalHalfLine) {
  auto r = leakage::leakage(PredictiveDistribution::normal(0, 1), Evidence::interval(0, kInf));
  EXPECT_NEAR(r.leakage, 0.5, 1e-15);
  EXPECT_NEAR(r.below_mass, 0.5, 1e-15);
  EXPECT_EQ(r.above_mass, 0.0);
  EXPECT_FALSE(r.complete);
}

TEST(Leakage, HandOlsCauchy) {
  auto r = leakage::leakage(hand_ols_predictive(), parse_support("[0,inf)"));
  EXPECT_NEAR(r.leakage, kCauchyLeak, 1e-13);
  EXPECT_NEAR(r.leakage, 0.10817, 1e-4);
}

TEST(Leakage, ContinuousAgainstLatticeIsComplete) {
  for (const auto& d : {PredictiveDistribution::normal(0, 1), PredictiveDistribution::student_t(3, 20, 0.1),
                        hand_ols_predictive()}) {
    auto r = leakage::leakage(d, Evidence::lattice(0.0, kInf, 0.1));
    EXPECT_EQ(r.leakage, 1.0);
    EXPECT_TRUE(r.complete);
  }
  auto r = leakage::leakage(PredictiveDistribution::normal(0, 1), Evidence::values({0.0}));
  EXPECT_EQ(r.leakage, 1.0);
  EXPECT_TRUE(r.complete);
}

TEST(Leakage, PoissonBoundedCounts) {
  const double expected = 1.0 - std::exp(-2.0) * 7.0;
  auto pois = PredictiveDistribution::poisson(2.0);
  EXPECT_NEAR(leakage::leakage(pois, Evidence::lattice(0, 4, 1)).leakage, expected, 1e-14);
  EXPECT_NEAR(leakage::leakage(pois, Evidence::lattice(0, 4, 1)).leakage, 0.052653, 1e-6);
  EXPECT_NEAR(leakage::leakage(pois, Evidence::values({0, 1, 2, 3, 4})).leakage, expected, 1e-14);
  // Same evidence expressed as an interval goes through the CDF route.
  auto r = leakage::leakage(pois, Evidence::interval(0, 4));
  EXPECT_NEAR(r.leakage, expected, 1e-14);
  EXPECT_NEAR(r.above_mass, expected, 1e-14);
  EXPECT_EQ(r.below_mass, 0.0);
}

TEST(Leakage, OpenEndsMatterOnlyForDiscrete) {
  auto pois = PredictiveDistribution::poisson(2.0);
  const double p0 = std::exp(-2.0);
  EXPECT_NEAR(leakage::leakage(pois, parse_support("(0,inf)")).leakage, p0, 1e-15);
  EXPECT_NEAR(leakage::leakage(pois, parse_support("[0,inf)")).leakage, 0.0, 1e-15);
  auto n = PredictiveDistribution::normal(0, 1);
  EXPECT_EQ(leakage::leakage(n, parse_support("(0,inf)")).leakage, leakage::leakage(n, parse_support("[0,inf)")).leakage);
}

TEST(Leakage, UnionOfIntervals) {
  auto n = PredictiveDistribution::normal(0, 1);
  auto e = parse_support("(-inf,-1]U[1,inf)");
  auto r = leakage::leakage(n, e);
  EXPECT_NEAR(r.leakage, oracle::Phi(1) - oracle::Phi(-1), 1e-14);
  EXPECT_NEAR(r.outside_mass_other, r.leakage, 0.0);
  EXPECT_EQ(r.below_mass, 0.0);
  // Discrete: the gap (2,5) between [0,2] and [5,9] holds atoms 3 and 4; the tails hold the rest.
  auto pois = PredictiveDistribution::poisson(3.0);
  auto rd = leakage::leakage(pois, parse_support("[0,2]U[5,9]"));
  double expected = density(pois, 3) + density(pois, 4) + sf(pois, 9);
  EXPECT_NEAR(rd.leakage, expected, 1e-14);
}

TEST(Leakage, FullSupportGivesZero) {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 200; ++i) {
    auto d = random_distribution(gen);
    EXPECT_EQ(leakage::leakage(d, Evidence::unrestricted()).leakage, 0.0);
  }
}

TEST(Leakage, DecompositionAndRange) {
  std::mt19937_64 gen(17);
  for (int i = 0; i < 1000; ++i) {
    auto d = random_distribution(gen);
    auto e = random_interval_evidence(gen);
    auto r = leakage::leakage(d, e);
    ASSERT_GE(r.leakage, 0.0);
    ASSERT_LE(r.leakage, 1.0);
    ASSERT_NEAR(r.leakage, r.below_mass + r.above_mass + r.outside_mass_other, 1e-12);
  }
}

TEST(Leakage, NestedSupportsAreMonotone) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    auto d = random_distribution(gen);
    const double a = -4 + u(gen), b = a + u(gen);
    const double widen_lo = u(gen), widen_hi = u(gen);
    auto inner = Evidence::interval(a, b);
    auto outer = Evidence::interval(a - widen_lo, b + widen_hi);
    ASSERT_GE(leakage::leakage(d, inner).leakage, leakage::leakage(d, outer).leakage - 1e-15);
  }
  auto pois = PredictiveDistribution::poisson(4.0);
  EXPECT_GE(leakage::leakage(pois, Evidence::lattice(0, 3, 1)).leakage,
            leakage::leakage(pois, Evidence::lattice(0, 8, 1)).leakage);
}

TEST(Leakage, StructurallyEmptyOverlapIsComplete) {
  auto die = PredictiveDistribution::empirical({1, 2, 3, 4, 5, 6});
  auto r = leakage::leakage(die, Evidence::interval(6.5, 9));
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.leakage, 1.0);
  // Numerically saturated but structurally positive mass is not complete.
  auto far = leakage::leakage(PredictiveDistribution::normal(0, 1), Evidence::interval(60, kInf));
  EXPECT_EQ(far.leakage, 1.0);
  EXPECT_FALSE(far.complete);
}

TEST(LeakageProfile, SingletonMatchesComposition) {
  auto data = parse_csv("x,y\n0,0\n1,1\n2,3\n");
  auto f = fit(data, {"y", {"x"}, true});
  auto e = parse_support("[0,inf)");
  auto prof = leakage_profile(f, e, {CovariatePoint{{"x", 1.0}}});
  ASSERT_EQ(prof.size(), 1u);
  EXPECT_EQ(prof[0].leakage, leakage::leakage(predictive_at(f, CovariatePoint{{"x", 1.0}}), e).leakage);
  EXPECT_NEAR(prof[0].leakage, kCauchyLeak, 1e-13);
  ASSERT_TRUE(prof[0].x_star.has_value());
}

TEST(LeakageProfile, InterceptOnlyIgnoresCovariates) {
  auto f = fit(parse_csv("y\n1\n2\n3\n"), {"y", {}, true});
  auto prof = leakage_profile(f, parse_support("[0,inf)"), {CovariatePoint{}, CovariatePoint{}});
  EXPECT_EQ(prof[0].leakage, prof[1].leakage);
  EXPECT_NEAR(prof[0].leakage, oracle::t2_cdf(-std::sqrt(3.0)), 1e-13);
}

TEST(LeakageProfile, NonincreasingAlongIncreasingLocation) {
  auto f = fit(parse_csv("x,y\n0,0\n1,1\n2,3\n"), {"y", {"x"}, true});
  std::vector<CovariatePoint> grid;
  for (double x = 0.5; x <= 3.0; x += 0.25) grid.push_back({{"x", x}});  // beyond the mean, leverage grows slower than location
  auto prof = leakage_profile(f, parse_support("[0,inf)"), grid);
  for (std::size_t i = 1; i < prof.size(); ++i) EXPECT_LE(prof[i].leakage, prof[i - 1].leakage);
}

TEST(LeakageProfile, EncodingErrorNamesGridIndex) {
  auto f = fit(parse_csv("x,y\n0,0\n1,1\n2,3\n"), {"y", {"x"}, true});
  try {
    leakage_profile(f, Evidence::unrestricted(), {CovariatePoint{{"x", 1.0}}, CovariatePoint{{"z", 1.0}}});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("grid point 1"), std::string::npos);
  }
}

TEST(MonteCarlo, Examples) {
  auto half = mc_leakage(PredictiveDistribution::normal(0, 1), Evidence::interval(0, kInf), 1'000'000, 3);
  EXPECT_LE(std::abs(half.estimate - 0.5), 3 * half.standard_error);
  const double target = oracle::t2_cdf(-std::sqrt(3.0));
  auto t = mc_leakage(PredictiveDistribution::student_t(2, 0, 1), Evidence::interval(-std::sqrt(3.0), kInf), 1'000'000, 5);
  EXPECT_LE(std::abs(t.estimate - target), 3 * t.standard_error);
  auto none = mc_leakage(PredictiveDistribution::student_t(1, 0, 1), Evidence::unrestricted(), 10'000, 1);
  EXPECT_EQ(none.estimate, 0.0);
  EXPECT_THROW(mc_leakage(PredictiveDistribution::normal(0, 1), Evidence::unrestricted(), 9'999, 1),
               std::invalid_argument);
}

TEST(MonteCarlo, Deterministic) {
  auto d = PredictiveDistribution::poisson(2.0);
  auto e = Evidence::lattice(0, 4, 1);
  EXPECT_EQ(mc_leakage(d, e, 20'000, 77).estimate, mc_leakage(d, e, 20'000, 77).estimate);
}

TEST(MonteCarlo, AgreesWithAnalyticOnTwentyCases) {
  const std::vector<std::pair<PredictiveDistribution, Evidence>> cases = {
      {PredictiveDistribution::normal(0, 1), parse_support("[0,inf)")},
      {PredictiveDistribution::normal(1, 2), parse_support("[-1,3]")},
      {PredictiveDistribution::normal(-2, 0.5), parse_support("(-inf,-2.5]U[-1,inf)")},
      {PredictiveDistribution::student_t(1, 4.0 / 3.0, std::sqrt(2.0 / 9.0)), parse_support("[0,inf)")},
      {PredictiveDistribution::student_t(2, 2, std::sqrt(4.0 / 3.0)), parse_support("[0,inf)")},
      {PredictiveDistribution::student_t(2, 0, 1), parse_support("[-1.7320508075688772,inf)")},
      {PredictiveDistribution::student_t(5, 1, 3), parse_support("[0,4]")},
      {PredictiveDistribution::student_t(0.8, 0, 1), parse_support("[-10,10]")},
      {PredictiveDistribution::student_t(30, 10, 2), parse_support("[8,inf)")},
      {PredictiveDistribution::poisson(2), parse_support("[0,4]")},
      {PredictiveDistribution::poisson(2), parse_support("lattice(0,4,1)")},
      {PredictiveDistribution::poisson(7.5), parse_support("(3,10)")},
      {PredictiveDistribution::poisson(0.4), parse_support("{0}")},
      {PredictiveDistribution::empirical({1, 2, 3, 4, 5, 6}), parse_support("[2,5]")},
      {PredictiveDistribution::empirical({0, 0, 1, 7}), parse_support("{0,1,2}")},
      {PredictiveDistribution::mixture({PredictiveDistribution::normal(0, 1), PredictiveDistribution::normal(3, 1)},
                                       {0.3, 0.7}),
       parse_support("[0,inf)")},
      {PredictiveDistribution::mixture({PredictiveDistribution::poisson(1), PredictiveDistribution::poisson(6)},
                                       {0.5, 0.5}),
       parse_support("[2,8]")},
      {PredictiveDistribution::normal(0, 1), parse_support("[-0.5,0.5]")},
      {PredictiveDistribution::student_t(3, -1, 0.5), parse_support("(-inf,0]")},
      {PredictiveDistribution::normal(5, 1), parse_support("lattice(0,10,0.1)")},
  };
  ASSERT_EQ(cases.size(), 20u);
  std::uint64_t seed = 1000;
  for (const auto& [d, e] : cases) {
    const auto exact = leakage::leakage(d, e);
    const auto mc = mc_leakage(d, e, 1'000'000, seed++);
    if (exact.complete && d.kind() == Kind::continuous) {
      EXPECT_EQ(mc.estimate, 1.0);
      continue;
    }
    EXPECT_LE(std::abs(exact.leakage - mc.estimate), 3 * mc.standard_error + 1e-15)
        << "case seed " << seed - 1 << " exact " << exact.leakage << " mc " << mc.estimate;
  }
}

TEST(EvidenceParsing, AcceptsNotationAndRejectsGarbage) {
  auto e = parse_support("[0,inf)");
  ASSERT_TRUE(e.is_continuous());
  EXPECT_EQ(e.interval_list()[0].lower, 0.0);
  EXPECT_TRUE(std::isinf(e.interval_list()[0].upper));
  EXPECT_TRUE(parse_support("(-inf,inf)").contains(-1e300));
  auto lat = parse_support("lattice(0, inf, 0.1)");
  EXPECT_FALSE(lat.is_continuous());
  EXPECT_TRUE(lat.contains(0.3));
  EXPECT_FALSE(lat.contains(0.35));
  EXPECT_FALSE(lat.contains(-0.1));
  for (const char* bad : {"", "[0,", "[a,b]", "[2,1]", "lattice(0,1)", "lattice(0,1,0)", "[0,2]U[1,3]", "[0,1]x[2,3]"})
    EXPECT_THROW(parse_support(bad), std::invalid_argument) << bad;
}

TEST(EvidenceJson, RoundTripPreservesMembershipAndLeakage) {
  std::mt19937_64 gen(3);
  const std::vector<Evidence> all = {parse_support("[0,inf)"), parse_support("(0,4]"), parse_support("(-inf,-1]U(1,2)U[5,inf)"),
                                     parse_support("lattice(0,inf,0.1)"), parse_support("lattice(-2,2,0.5)"),
                                     parse_support("{1,2,3}")};
  std::uniform_real_distribution<double> u(-10, 10);
  for (const auto& e : all) {
    nlohmann::json j = e;
    auto text = j.dump();
    auto back = evidence_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.kind(), e.kind());
    for (int i = 0; i < 200; ++i) {
      const double y = (i % 2) ? u(gen) : std::round(u(gen) * 2) / 2;
      ASSERT_EQ(back.contains(y), e.contains(y)) << text << " y=" << y;
    }
    auto pois = PredictiveDistribution::poisson(2);
    EXPECT_EQ(leakage::leakage(pois, back).leakage, leakage::leakage(pois, e).leakage);
  }
  auto spec_shape = evidence_from_json(nlohmann::json::parse(R"({"kind":"continuous_support","intervals":[[0,"inf"]]})"));
  EXPECT_TRUE(spec_shape.contains(1e9));
  auto lattice_shape = evidence_from_json(
      nlohmann::json::parse(R"({"kind":"discrete_support","lattice":{"lower":0,"upper":10,"step":0.5}})"));
  EXPECT_TRUE(lattice_shape.contains(9.5));
  EXPECT_THROW(evidence_from_json(nlohmann::json::parse(R"({"kind":"nope"})")), std::invalid_argument);
}
