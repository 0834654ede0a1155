#include <gtest/gtest.h>

#include <cmath>

#include "ldpbdp/error.hpp"
#include "ldpbdp/rate_functional.hpp"
#include "ldpbdp/rng.hpp"

using namespace ldpbdp;

TEST(Classify, Regimes) {
  const auto a = classify(RateModel::power(1.0, 1.0, 1.0, 0.0));
  EXPECT_EQ(a.regime, Regime::BirthDominant);
  EXPECT_DOUBLE_EQ(psi(a, 3.0), 9.0);
  EXPECT_EQ(classify(RateModel::power(1.0, 1.0, 1.0, 1.0)).regime, Regime::Degenerate);
  EXPECT_EQ(classify(RateModel::power(4.0, 1.0, 1.0, 1.0)).regime, Regime::Balanced);
  const auto c = classify(RateModel::power(1.0, 0.0, 3.0, 2.0));
  EXPECT_EQ(c.regime, Regime::DeathDominant);
  EXPECT_DOUBLE_EQ(psi(c, 2.0), 8.0);
  const auto yule = classify(RateModel::power(1.0, 1.0, 0.0, 3.0));
  EXPECT_EQ(yule.regime, Regime::BirthDominant);
  EXPECT_DOUBLE_EQ(yule.psi_exponent, 2.0);
}

TEST(Romberg, PolynomialsAndSmoothFunctions) {
  EXPECT_NEAR(romberg([](double t) { return t * t * t; }, 1025).value, 0.25, 1e-14);
  const auto r = romberg([](double t) { return std::exp(t); }, 1025);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::exp(1.0) - 1.0, 1e-12);
  EXPECT_NEAR(integrate_power(TargetProfile::power(0.5), 2.0).value, 0.5, 1e-12);
}

TEST(RateFunctional, AnalyticAnchors) {
  const auto f = TargetProfile::linear();
  EXPECT_NEAR(rate_functional(RateModel::power(2.0, 1.0, 1.0, 0.0), f), 1.0, 1e-9);
  EXPECT_NEAR(rate_functional(RateModel::power(4.0, 1.0, 1.0, 1.0), f), 0.5, 1e-9);
  EXPECT_NEAR(rate_functional(RateModel::power(1.0, 0.0, 3.0, 2.0), f), 1.0, 1e-9);
}

TEST(RateFunctional, DegenerateIsRefused) {
  EXPECT_THROW(rate_functional(RateModel::power(2.0, 1.0, 2.0, 1.0), TargetProfile::linear()),
               ValidationError);
}

TEST(RateFunctional, HomogeneousInProfileScale) {
  // I(c f) = c^v I(f) with v the dominant exponent.
  const auto model = RateModel::power(1.5, 2.0, 1.0, 0.5);
  const auto f = TargetProfile::power(1.5);
  const double base = rate_functional(model, f);
  for (double c : {0.5, 2.0, 3.0})
    EXPECT_NEAR(rate_functional(model, f.scaled(c)), c * c * base, 1e-9 * c * c * base);
}

TEST(RateFunctional, MonotoneInProfile) {
  const auto model = RateModel::power(1.0, 0.0, 2.0, 1.5);
  const double lower = rate_functional(model, TargetProfile::power(2.0));
  const double upper = rate_functional(model, TargetProfile::linear());
  EXPECT_LT(lower, upper);
}

TEST(YuleRateFunctional, Anchors) {
  EXPECT_NEAR(yule_rate_functional(RateModel::power(1.0, 1.0, 0.0, 0.0), TargetProfile::power(2.0)),
              1.0 / 3.0, 1e-9);
  EXPECT_NEAR(yule_rate_functional(RateModel::power(3.0, 2.0, 0.0, 0.0), TargetProfile::linear()), 1.0,
              1e-9);
}

TEST(YuleRateFunctional, RejectsDecreasingProfile) {
  const auto bump = TargetProfile::table({0.0, 0.5, 1.0}, {0.0, 2.0, 1.0});
  EXPECT_THROW(yule_rate_functional(RateModel::power(1.0, 1.0, 0.0, 0.0), bump), ValidationError);
  EXPECT_THROW(yule_rate_functional(RateModel::power(1.0, 1.0, 1.0, 0.0), TargetProfile::linear()),
               ValidationError);
}

TEST(TubeMembership, StaircaseWithinOneTenth) {
  std::vector<double> times;
  std::vector<int> signs;
  for (int k = 1; k <= 10; ++k) {
    times.push_back(k);
    signs.push_back(1);
  }
  const JumpPath p(10.0, times, signs);
  const auto check = tube_membership(p, TargetProfile::linear(), 0.2);
  EXPECT_TRUE(check.member);
  EXPECT_NEAR(check.sup_distance, 0.1, 1e-15);
  EXPECT_FALSE(tube_membership(p, TargetProfile::linear(), 0.1).member);
  EXPECT_TRUE(tube_membership(p, TargetProfile::linear(), 0.1).boundary);
}

TEST(TubeMembership, ZeroPathOutsideLinearTube) {
  const auto check = tube_membership(JumpPath(4.0, {}, {}), TargetProfile::linear(), 0.5);
  EXPECT_FALSE(check.member);
  EXPECT_DOUBLE_EQ(check.sup_distance, 1.0);
}

TEST(TubeMembership, ExplodedOutcomeIsNeverMember) {
  SimOutcome out{JumpPath(1.0, {}, {}), SimStatus::Exploded};
  const auto check = tube_membership(out, TargetProfile::linear(), 1e6);
  EXPECT_FALSE(check.member);
  EXPECT_TRUE(std::isinf(check.sup_distance));
}

TEST(TubeMembership, MonotoneInEpsilonAndBoundsPointwiseScan) {
  const auto model = RateModel::power(1.0, 1.0, 1.0, 0.0);
  const auto f = TargetProfile::power(1.5);
  for (int i = 0; i < 300; ++i) {
    const auto sim = simulate_bdp(model, 3.0, derive_seed(41, i), 100000);
    const auto check = tube_membership(sim.path, f, 0.5);
    // Dense scan from inside each constancy interval never exceeds the exact sup.
    const auto s = rescale(sim.path);
    double scan = 0.0;
    for (int k = 0; k <= 4000; ++k) {
      const double t = k / 4000.0;
      scan = std::max(scan, std::abs(f(t) - s.value_at(t)));
    }
    EXPECT_LE(scan, check.sup_distance + 1e-12);
    for (double eps : {0.2, 0.4, 0.6, 0.9}) {
      const bool in = tube_membership(sim.path, f, eps).member;
      if (in) EXPECT_TRUE(tube_membership(sim.path, f, eps + 0.1).member);
    }
  }
}

TEST(TubeMonitor, EarlyExitAgreesWithFullScan) {
  const auto model = RateModel::power(1.0, 1.0, 1.0, 0.0);
  const auto f = TargetProfile::linear();
  for (int i = 0; i < 200; ++i) {
    const auto sim = simulate_bdp(model, 4.0, derive_seed(42, i), 100000);
    TubeMonitor mon(f, 0.5, 4.0);
    State x = 0;
    double prev = 0.0;
    bool inside = true;
    const auto times = sim.path.jump_times();
    const auto signs = sim.path.jump_signs();
    for (std::size_t k = 0; k < times.size() && inside; ++k) {
      inside = mon.hold(prev, times[k], x);
      x += signs[k];
      prev = times[k];
    }
    if (inside) inside = mon.hold(prev, 4.0, x);
    EXPECT_EQ(inside, tube_membership(sim.path, f, 0.5).member);
  }
}
