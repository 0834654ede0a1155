#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ldpbdp/measure.hpp"
#include "ldpbdp/rate_functional.hpp"
#include "ldpbdp/rng.hpp"
#include "support/oracles.hpp"

using namespace ldpbdp;

TEST(PathFunctionals, ZeroJumpPath) {
  const auto model = RateModel::power(2.5, 1.0, 1.0, 0.0);
  const JumpPath p(3.0, {}, {});
  const auto f = compute_functionals(model, p);
  EXPECT_DOUBLE_EQ(f.a_T, 2.5 * 3.0);
  EXPECT_DOUBLE_EQ(f.b_T, 0.0);
  EXPECT_EQ(f.n_T, 0);
  EXPECT_DOUBLE_EQ(log_density(model, p), -(2.5 - 1.0) * 3.0);
}

TEST(PathFunctionals, SingleUpJumpHandComputed) {
  // lambda = 2, mu = 3 on x >= 1; one +1 jump at t = 1 on [0, 2].
  const auto model = RateModel::power(2.0, 0.0, 3.0, 0.0);
  const JumpPath p(2.0, {1.0}, {1});
  const auto f = compute_functionals(model, p);
  EXPECT_DOUBLE_EQ(f.a_T, 7.0);
  EXPECT_DOUBLE_EQ(f.b_T, std::log(2.0));
  EXPECT_EQ(f.n_T, 1);
  EXPECT_EQ(f.k_plus, 1);
  EXPECT_EQ(f.L, 1);
}

TEST(PathFunctionals, DownJumpFromZeroHasZeroDensity) {
  const auto model = RateModel::power(1.0, 1.0, 1.0, 0.0);
  const JumpPath p(2.0, {0.5, 1.0}, {-1, 1});
  const auto f = compute_functionals(model, p);
  EXPECT_EQ(f.b_T, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_weight(f, 2.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_density(model, p), -std::numeric_limits<double>::infinity());
}

TEST(LogDensity, UnitYuleMatchesDirectProduct) {
  // lambda = 1, mu = 0: every holding rate equals the reference rate, so the
  // density of an all-up path is the ratio of jump-choice probabilities, 2^N.
  const auto yule = RateModel::power(1.0, 0.0, 0.0, 0.0);
  const JumpPath p(4.0, {0.3, 1.7, 2.2, 3.9}, {1, 1, 1, 1});
  const double expected = 4.0 * std::numbers::ln2;
  EXPECT_NEAR(log_density(yule, p), expected, 1e-14);
  const std::vector<double> times(p.jump_times().begin(), p.jump_times().end());
  const std::vector<int> signs(p.jump_signs().begin(), p.jump_signs().end());
  const double ratio = testkit::path_log_likelihood(times, signs, 4.0, [](std::int64_t) { return 1.0; },
                                                    [](std::int64_t) { return 0.0; }) -
                       testkit::reference_log_likelihood(times.size(), 4.0);
  EXPECT_NEAR(ratio, expected, 1e-14);
}

TEST(LogDensity, AgreesWithLikelihoodRatioOnRandomPaths) {
  struct Case {
    double cl, l, cm, m;
  };
  const Case cases[] = {{1.0, 1.0, 1.0, 0.0}, {4.0, 1.0, 1.0, 1.0}, {1.0, 0.0, 3.0, 2.0}, {0.7, 1.5, 2.0, 0.5}};
  int finite = 0;
  for (int i = 0; i < 600; ++i) {
    const auto& c = cases[i % 4];
    const auto model = RateModel::power(c.cl, c.l, c.cm, c.m);
    const double T = 1.0 + (i % 7);
    const auto sim = simulate_reference(T, derive_seed(31, i), reference_jump_cap(T));
    const std::vector<double> times(sim.path.jump_times().begin(), sim.path.jump_times().end());
    const std::vector<int> signs(sim.path.jump_signs().begin(), sim.path.jump_signs().end());
    const double expected =
        testkit::path_log_likelihood(
            times, signs, T, [&](std::int64_t x) { return c.cl * std::pow(1.0 + x, c.l); },
            [&](std::int64_t x) { return c.cm * std::pow(static_cast<double>(x), c.m); }) -
        testkit::reference_log_likelihood(times.size(), T);
    const double factorwise = log_density(model, sim.path);
    const double assembled = log_weight(compute_functionals(model, sim.path), T);
    if (std::isinf(expected)) {
      EXPECT_EQ(factorwise, expected);
      EXPECT_EQ(assembled, expected);
      continue;
    }
    ++finite;
    const double scale = std::max(1.0, std::abs(expected));
    EXPECT_NEAR(factorwise, expected, 1e-10 * scale);
    EXPECT_NEAR(assembled, expected, 1e-10 * scale);
  }
  EXPECT_GT(finite, 50);
}

TEST(JumpBalance, Examples) {
  const JumpPath p(1.0, {0.1, 0.2, 0.3}, {1, 1, -1});
  const auto b = jump_balance(p);
  EXPECT_EQ(b.k_plus, 2);
  EXPECT_EQ(b.k_minus, 1);
  EXPECT_EQ(b.L, 1);
  const auto e = jump_balance(JumpPath(1.0, {}, {}));
  EXPECT_EQ(e.k_plus + e.k_minus + e.L, 0);
}

TEST(JumpBalance, TubePathsEndNearProfileEndpoint) {
  const auto model = RateModel::power(1.0, 1.0, 1.0, 0.0);
  const auto f = TargetProfile::linear();
  const double T = 5.0;
  const double eps = 0.5;
  int members = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto sim = simulate_bdp(model, T, derive_seed(32, i), 100000);
    if (!tube_membership(sim, f, eps).member) continue;
    ++members;
    const auto L = static_cast<double>(jump_balance(sim.path).L);
    EXPECT_GE(L, (f(1.0) - eps) * T);
    EXPECT_LE(L, (f(1.0) + eps) * T);
  }
  EXPECT_GT(members, 20);
}
