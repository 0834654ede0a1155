#include <gtest/gtest.h>

#include <cmath>

#include "ldpbdp/error.hpp"
#include "ldpbdp/profile.hpp"

using namespace ldpbdp;

TEST(TargetProfile, LinearAndPowerRangesAreExact) {
  const auto f = TargetProfile::linear(2.0);
  const auto r = f.range(0.25, 0.5);
  EXPECT_DOUBLE_EQ(r.min, 0.5);
  EXPECT_DOUBLE_EQ(r.max, 1.0);
  EXPECT_EQ(r.slack, 0.0);
  const auto g = TargetProfile::power(0.5);
  EXPECT_TRUE(g.has_exact_range());
  EXPECT_FALSE(g.lipschitz().has_value());
  EXPECT_DOUBLE_EQ(g.range(0.0, 0.25).max, 0.5);
}

TEST(TargetProfile, TableRangeIncludesInteriorKnots) {
  const auto f = TargetProfile::table({0.0, 0.5, 1.0}, {0.0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(f(0.25), 1.0);
  EXPECT_DOUBLE_EQ(f(0.75), 1.5);
  const auto r = f.range(0.25, 0.75);
  EXPECT_DOUBLE_EQ(r.min, 1.0);
  EXPECT_DOUBLE_EQ(r.max, 2.0);
  EXPECT_DOUBLE_EQ(*f.lipschitz(), 4.0);
}

TEST(TargetProfile, UniformTableKnots) {
  const auto f = TargetProfile::table(std::vector<double>{0.0, 1.0, 3.0});
  EXPECT_DOUBLE_EQ(f(0.5), 1.0);
  EXPECT_DOUBLE_EQ(f(0.75), 2.0);
}

TEST(TargetProfile, RejectsMalformedTables) {
  EXPECT_THROW(TargetProfile::table({0.0, 0.5}, {0.0, 1.0}), ValidationError);
  EXPECT_THROW(TargetProfile::table({0.0, 0.6, 0.4, 1.0}, {0.0, 1.0, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(TargetProfile::table(std::vector<double>{0.0}), ValidationError);
}

TEST(TargetProfile, GridRangeWithLipschitzSlackCoversTrueExtremum) {
  // Peak at t = 1/3, which no dyadic grid point hits.
  const TargetProfile tent([](double t) { return 1.0 - std::abs(3.0 * t - 1.0); }, 3.0);
  const auto r = tent.range(0.0, 1.0, 65);
  EXPECT_LT(r.max, 1.0);
  EXPECT_GE(r.max + r.slack, 1.0);
  EXPECT_FALSE(r.heuristic);

  const TargetProfile no_modulus([](double t) { return std::sin(3.0 * t) + t; });
  EXPECT_TRUE(no_modulus.range(0.0, 1.0, 129).heuristic);
}

TEST(TargetProfile, ScaledKeepsExactRange) {
  const auto f = TargetProfile::linear().scaled(3.0);
  EXPECT_DOUBLE_EQ(f(0.5), 1.5);
  EXPECT_DOUBLE_EQ(f.range(0.0, 1.0).max, 3.0);
  EXPECT_DOUBLE_EQ(*f.lipschitz(), 3.0);
}

TEST(ValidateProfile, AcceptsStandardProfiles) {
  EXPECT_NO_THROW(validate_profile(TargetProfile::linear()));
  EXPECT_NO_THROW(validate_profile(TargetProfile::power(2.0)));
}

TEST(ValidateProfile, RejectsNonzeroStart) {
  const TargetProfile f([](double t) { return 0.1 + t; });
  EXPECT_THROW(validate_profile(f), ValidationError);
}

TEST(ValidateProfile, RejectsInteriorZero) {
  const TargetProfile f([](double t) { return std::abs(t - 0.5); });
  EXPECT_THROW(validate_profile(f), ValidationError);
}

TEST(ValidateProfile, RejectsDiscontinuity) {
  const TargetProfile f([](double t) { return t < 0.5 ? t : t + 1.0; });
  EXPECT_THROW(validate_profile(f), ValidationError);
}

TEST(ValidateProfile, Monotonicity) {
  EXPECT_TRUE(is_nondecreasing(TargetProfile::power(2.0)));
  EXPECT_FALSE(is_nondecreasing(TargetProfile::table({0.0, 0.5, 1.0}, {0.0, 2.0, 1.0})));
}
