#include <gtest/gtest.h>

#include <random>

#include "leakage/falsification.hpp"

using namespace leakage;

TEST(Falsification, ContinuousModelFalsifiedByPointObservation) {
  auto v = is_falsified(PredictiveDistribution::normal(0, 1), {{1.3}});
  EXPECT_TRUE(v.falsified);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->value, 1.3);
  EXPECT_EQ(v.mode, ObservationMode::point_event);
}

TEST(Falsification, DieOutcomeSeven) {
  auto die = PredictiveDistribution::empirical({1, 2, 3, 4, 5, 6});
  auto v = is_falsified(die, {{3}, {7}, {8}});
  EXPECT_TRUE(v.falsified);
  EXPECT_EQ(v.witness->value, 7.0);
  EXPECT_FALSE(is_falsified(die, {{1}, {6}}).falsified);
}

TEST(Falsification, PoissonNeverFalsifiedByCounts) {
  std::vector<Observation> obs;
  for (int k = 0; k <= 100; ++k) obs.push_back({static_cast<double>(k)});
  auto v = is_falsified(PredictiveDistribution::poisson(2), obs);
  EXPECT_FALSE(v.falsified);
  EXPECT_FALSE(v.witness.has_value());
  EXPECT_TRUE(is_falsified(PredictiveDistribution::poisson(2), {{2.5}}).falsified);
  EXPECT_TRUE(is_falsified(PredictiveDistribution::poisson(2), {{-1}}).falsified);
}

TEST(Falsification, TinyButPositiveMassNeverFalsifies) {
  for (double eps : {1e-3, 1e-12, 1e-100, 1e-200, 1e-300}) {
    auto d = PredictiveDistribution::mixture(
        {PredictiveDistribution::point_mass(0.0), PredictiveDistribution::point_mass(1.0)}, {1.0 - eps, eps});
    EXPECT_FALSE(is_falsified(d, {{1.0}}).falsified) << eps;
  }
  // Poisson mass at 1000 with rate 2 underflows to zero in floating point but is positive.
  auto p = PredictiveDistribution::poisson(2);
  EXPECT_EQ(density(p, 1000), 0.0);
  EXPECT_FALSE(is_falsified(p, {{1000}}).falsified);
}

TEST(Falsification, EveryContinuousFamilyFalsifiedInPointMode) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z(0.0, 50.0);
  const std::vector<PredictiveDistribution> fams = {
      PredictiveDistribution::normal(0, 1), PredictiveDistribution::student_t(1, 0, 1),
      PredictiveDistribution::student_t(40, -3, 0.01),
      PredictiveDistribution::mixture({PredictiveDistribution::normal(0, 1), PredictiveDistribution::normal(5, 2)},
                                      {0.5, 0.5})};
  for (const auto& d : fams) {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<Observation> obs(1 + rep % 7);
      for (auto& o : obs) o.value = std::round(z(gen));
      auto v = is_falsified(d, obs);
      ASSERT_TRUE(v.falsified);
      ASSERT_EQ(v.witness->value, obs.front().value);
    }
  }
}

TEST(Falsification, IntervalMode) {
  auto n = PredictiveDistribution::normal(0, 1);
  EXPECT_FALSE(is_falsified(n, {{1.3, 0.1}}, ObservationMode::interval_event).falsified);
  auto p = PredictiveDistribution::poisson(2);
  EXPECT_FALSE(is_falsified(p, {{3.0, 1.0}}, ObservationMode::interval_event).falsified);
  // Cell [2.6, 2.8) holds no integer.
  auto v = is_falsified(p, {{3.0, 1.0}, {2.7, 0.2}}, ObservationMode::interval_event);
  EXPECT_TRUE(v.falsified);
  EXPECT_EQ(v.witness->value, 2.7);
  // Cells are half-open: [2.5, 3.5) includes 3, [3.5, 4.5) includes 4 but not 3.5.
  auto die = PredictiveDistribution::empirical({1, 2, 3, 4, 5, 6});
  EXPECT_FALSE(is_falsified(die, {{6.4, 1.0}}, ObservationMode::interval_event).falsified);
  EXPECT_TRUE(is_falsified(die, {{6.6, 1.0}}, ObservationMode::interval_event).falsified);
  EXPECT_TRUE(is_falsified(die, {{0.5, 1.0}}, ObservationMode::interval_event).falsified);
}

TEST(Falsification, Errors) {
  auto n = PredictiveDistribution::normal(0, 1);
  EXPECT_THROW(is_falsified(n, {}), std::invalid_argument);
  EXPECT_THROW(is_falsified(n, {{1.0}}, ObservationMode::interval_event), std::invalid_argument);
  EXPECT_THROW(is_falsified(n, {{1.0, 0.5}, {2.0}}, ObservationMode::interval_event), std::invalid_argument);
  EXPECT_THROW(is_falsified(n, {{1.0, -0.5}}, ObservationMode::interval_event), std::invalid_argument);
  EXPECT_THROW(is_falsified(n, {{std::nan("")}}), std::invalid_argument);
}

TEST(NeverFalsifiable, Examples) {
  EXPECT_TRUE(never_falsifiable(PredictiveDistribution::poisson(2), Evidence::lattice(0, 50, 1)));
  std::vector<double> upto10;
  for (int k = 0; k <= 10; ++k) upto10.push_back(k);
  auto bounded = PredictiveDistribution::empirical(upto10);
  EXPECT_FALSE(never_falsifiable(bounded, Evidence::lattice(0, 20, 1)));
  EXPECT_TRUE(never_falsifiable(bounded, Evidence::lattice(0, 10, 1)));
  EXPECT_TRUE(never_falsifiable(PredictiveDistribution::point_mass(3), Evidence::values({3})));
  EXPECT_FALSE(never_falsifiable(PredictiveDistribution::normal(0, 1), Evidence::values({3})));
}

TEST(NeverFalsifiable, Errors) {
  EXPECT_THROW(never_falsifiable(PredictiveDistribution::poisson(2), Evidence::interval(0, 10)), std::invalid_argument);
  EXPECT_THROW(never_falsifiable(PredictiveDistribution::poisson(2), Evidence::lattice(0, kInf, 1)),
               std::invalid_argument);
}

TEST(NeverFalsifiable, ImpliesNoObservationFalsifiesExhaustively) {
  const std::vector<PredictiveDistribution> models = {
      PredictiveDistribution::poisson(0.3), PredictiveDistribution::poisson(9),
      PredictiveDistribution::empirical({0, 1, 2, 3, 4, 5}),
      PredictiveDistribution::mixture({PredictiveDistribution::poisson(1), PredictiveDistribution::point_mass(0.5)},
                                      {0.9, 0.1})};
  const std::vector<Evidence> supports = {Evidence::lattice(0, 5, 1), Evidence::lattice(0, 60, 1),
                                          Evidence::values({0, 0.5, 1}), Evidence::lattice(0, 3, 0.5)};
  int implications = 0;
  for (const auto& d : models) {
    for (const auto& e : supports) {
      if (!never_falsifiable(d, e)) continue;
      ++implications;
      const auto values = *e.enumerate();
      for (double y : values) ASSERT_FALSE(is_falsified(d, {{y}}).falsified) << y;
    }
  }
  EXPECT_GE(implications, 4);
}

TEST(Falsification, JsonShape) {
  nlohmann::json j = is_falsified(PredictiveDistribution::normal(0, 1), {{2.0}});
  EXPECT_EQ(j["falsified"], true);
  EXPECT_EQ(j["mode"], "point_event");
  EXPECT_EQ(j["witness"]["value"], 2.0);
  nlohmann::json k = is_falsified(PredictiveDistribution::poisson(1), {{2.0}});
  EXPECT_TRUE(k["witness"].is_null());
}
