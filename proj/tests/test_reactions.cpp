#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "settler/reactions.hpp"

using namespace settler;

namespace {

const std::array<double, 3> kFeedS{6.0e-3, 9.0e-4, 0.0};

struct Rates {
  std::array<double, 2> C{};
  std::array<double, 3> S{};
};

Rates eval(const ReactionModel& m, std::array<double, 2> C, std::array<double, 3> S) {
  Rates r;
  m.rates(C, S, r.C, r.S);
  return r;
}

}  // namespace

TEST(Denitrification, YieldCoefficient) {
  const Denitrification d;
  EXPECT_NEAR(d.Ybar(), 0.1722158439, 1e-10);
  EXPECT_NEAR(d.Ybar(), (1.0 - 0.67) / (2.86 * 0.67), 1e-15);
}

TEST(Denitrification, GrowthRateAtFeed) {
  const Denitrification d;
  EXPECT_NEAR(d.growth_rate(kFeedS), 2.21008465e-6, 1e-14);
  EXPECT_EQ(d.growth_rate(std::array<double, 3>{0.0, 1.0, 0.0}), 0.0);
  EXPECT_EQ(d.growth_rate(std::array<double, 3>{1.0, 0.0, 0.0}), 0.0);
}

TEST(Denitrification, RatesAtFeed) {
  const Denitrification d;
  const auto r = eval(d, {1.0, 0.0}, kFeedS);
  EXPECT_NEAR(r.S[0], -3.80611593e-7, 1e-15);
  EXPECT_NEAR(r.S[2], 3.80611593e-7, 1e-15);
  EXPECT_NEAR(r.C[0], 2.21008465e-6 - 6.94e-6, 1e-14);
  EXPECT_NEAR(r.C[1], 0.2 * 6.94e-6, 1e-18);
}

TEST(Denitrification, NitrogenIsConservedAndSignsHold) {
  const Denitrification d;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0.0, 15.0), s(0.0, 0.05);
  for (int i = 0; i < 10000; ++i) {
    const auto r = eval(d, {c(rng), c(rng)}, {s(rng), s(rng), s(rng)});
    EXPECT_NEAR(r.S[0] + r.S[2], 0.0, 1e-20);
    EXPECT_LE(r.S[0], 0.0);
    EXPECT_GE(r.S[2], 0.0);
    EXPECT_GE(r.C[1], 0.0);
  }
}

TEST(Denitrification, NoBiomassNoReaction) {
  const Denitrification d;
  const auto r = eval(d, {0.0, 5.0}, {0.01, 0.01, 0.01});
  for (double v : r.C) EXPECT_EQ(v, 0.0);
  for (double v : r.S) EXPECT_EQ(v, 0.0);
}

TEST(Denitrification, AggregatesMatchSums) {
  const Denitrification d;
  const std::array<double, 2> C{4.0, 1.5};
  const auto r = eval(d, C, kFeedS);
  const auto [rc, rs] = d.aggregates(C, kFeedS);
  EXPECT_NEAR(rc, r.C[0] + r.C[1], 1e-18);
  EXPECT_NEAR(rs, r.S[0] + r.S[1] + r.S[2], 1e-18);
}

TEST(Denitrification, RampSwitchesGrowthOffAtCapacity) {
  DenitrificationParams p;
  p.z_mode = ZMode::ramp;
  const Denitrification d(p, 30.0);
  EXPECT_EQ(d.z_factor(10.0), 1.0);
  EXPECT_EQ(d.z_factor(28.5), 1.0);
  EXPECT_NEAR(d.z_factor(29.25), 0.5, 1e-12);
  EXPECT_EQ(d.z_factor(30.0), 0.0);
  const auto r = eval(d, {20.0, 10.0}, kFeedS);
  EXPECT_EQ(r.C[0], 0.0);
  EXPECT_EQ(r.C[1], 0.0);
  EXPECT_EQ(Denitrification().z_factor(30.0), 1.0);
}

TEST(Denitrification, AnalyticBounds) {
  const Denitrification d;
  const auto b = d.derivative_bounds();
  EXPECT_NEAR(b.M_C, 5.56e-5, 1e-18);
  EXPECT_NEAR(b.M_C_total, 5.56e-5, 1e-18);
  EXPECT_NEAR(b.M_S, 4.97910448, 1e-7);
  EXPECT_NEAR(b.M_S_total, 30.0 * 5.56e-5 / 5e-4, 1e-12);

  DenitrificationParams p;
  p.z_mode = ZMode::ramp;
  const auto br = Denitrification(p, 30.0).derivative_bounds();
  EXPECT_NEAR(br.M_C, 5.56e-5 * 21.0, 1e-15);
  EXPECT_EQ(br.M_S, b.M_S);
}

TEST(Denitrification, SampledBoundsStayBelowAnalytic) {
  for (ZMode mode : {ZMode::identity, ZMode::ramp}) {
    DenitrificationParams p;
    p.z_mode = mode;
    const Denitrification d(p, 30.0);
    const auto a = d.derivative_bounds();
    const auto s = sampled_derivative_bounds(d, 30.0, 0.05, 20000, 1.0);
    EXPECT_LE(s.M_C, a.M_C * (1 + 1e-6));
    EXPECT_LE(s.M_C_total, a.M_C_total * (1 + 1e-6));
    EXPECT_LE(s.M_S, a.M_S * (1 + 1e-6));
    EXPECT_LE(s.M_S_total, a.M_S_total * (1 + 1e-6));
    // the analytic values are not wildly pessimistic
    EXPECT_GT(s.M_C, 0.5 * a.M_C);
    EXPECT_GT(s.M_S, 0.25 * a.M_S);
  }
}

TEST(Denitrification, ParameterValidation) {
  DenitrificationParams p;
  p.Y = 1.2;
  EXPECT_THROW(Denitrification{p}, std::invalid_argument);
  p = {};
  p.K_S = 0.0;
  EXPECT_THROW(Denitrification{p}, std::invalid_argument);
  p = {};
  p.X_Z_fraction = 1.0;
  EXPECT_THROW(Denitrification{p}, std::invalid_argument);
}

TEST(NoReactions, AllZero) {
  const NoReactions n(2, 3);
  const auto r = eval(n, {3.0, 1.0}, kFeedS);
  for (double v : r.C) EXPECT_EQ(v, 0.0);
  for (double v : r.S) EXPECT_EQ(v, 0.0);
  const auto b = n.derivative_bounds();
  EXPECT_EQ(b.M_C + b.M_C_total + b.M_S + b.M_S_total, 0.0);
}
