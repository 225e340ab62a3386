#include <gtest/gtest.h>

#include <cmath>

#include "lipext/schedule.hpp"
#include "lipext/verification.hpp"
#include "random_instances.hpp"

using namespace lipext;

TEST(Schedule, RStarSubstitution) {
  const auto s = build_schedule(1.0, 1.0, 1.0, 1e-6, 10.0);
  EXPECT_EQ(s.r_star, 1.0 / 6.0);
  EXPECT_EQ(s.k_ref, 0);
}

TEST(Schedule, UnrolledValues) {
  const auto s = build_schedule(1.0, 1.0, 1.0, 1e-6, 10.0);
  ASSERT_LE(s.k_min, -2);
  ASSERT_GE(s.k_max, 1);
  EXPECT_NEAR(s.epsilon(0), 1.0, 1e-15);
  EXPECT_NEAR(s.epsilon(1), 6.0, 6e-15);
  EXPECT_NEAR(s.epsilon(-1), 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(s.epsilon(-2), 1.0 / 72.0, 1e-17);
  EXPECT_LE(s.epsilon(s.k_min), 1e-6);
  EXPECT_GE(s.epsilon(s.k_max), 10.0);
}

TEST(Schedule, RatiosFollowDesign) {
  const auto s = build_schedule(2.0, 0.5, 3.0, 1e-9, 1e3);
  for (int k = s.k_min + 1; k <= s.k_max; ++k) {
    EXPECT_EQ(s.ratio(k), design_ratio(s.r_star, k));
    EXPECT_EQ(s.epsilon(k - 1), s.ratio(k) * s.epsilon(k));
  }
  EXPECT_EQ(design_ratio(0.25, 3), 0.25);
  EXPECT_EQ(design_ratio(0.25, -2), 0.0625);
}

TEST(Schedule, EqualBudgetGivesSixfoldGaps) {
  const auto s = build_schedule(5.0, 5.0, 1.0, 1e-8, 1e4);
  for (int k = s.k_min + 1; k <= s.k_max; ++k) EXPECT_LE(s.epsilon(k - 1), s.epsilon(k) / 6.0);
}

TEST(Schedule, LawsHold) {
  for (double L : {1e-3, 0.7, 1.0, 40.0})
    for (double eps : {L / 100, L / 3, L, 7 * L}) {
      const auto s = build_schedule(L, eps, 2.0, 1e-7, 1e3);
      EXPECT_TRUE(check_schedule_laws(s).passed()) << L << " " << eps;
    }
}

TEST(Schedule, EpsilonAboveLIsCapped) {
  const auto s = build_schedule(1.0, 100.0, 1.0, 1e-3, 10.0);
  EXPECT_EQ(s.eps_eff, 1.0);
  EXPECT_EQ(s.r_star, 1.0 / 6.0);
}

TEST(Schedule, Errors) {
  EXPECT_THROW(build_schedule(0.0, 1.0, 1.0, 1e-3, 1.0), TrivialInstance);
  EXPECT_THROW(build_schedule(1.0, 0.0, 1.0, 1e-3, 1.0), InvalidArgument);
  EXPECT_THROW(build_schedule(1.0, -1.0, 1.0, 1e-3, 1.0), InvalidArgument);
  EXPECT_THROW(build_schedule(1.0, 1.0, 1.0, 2.0, 1.0), InvalidArgument);
  const auto s = build_schedule_range(1.0, 1.0, 1.0, -3, 2);
  EXPECT_THROW(s.epsilon(3), ScheduleExhausted);
  EXPECT_THROW(s.ratio(-3), ScheduleExhausted);
}

TEST(Locality, ExampleScan) {
  const auto s = build_schedule(1.0, 1.0, 1.0, 1e-6, 100.0);
  const double r_bar = 10.0 * s.epsilon(0);
  const auto loc = locality_radius(s, r_bar, 1.0, 1.0);
  int expect = s.k_min;
  for (int k = s.k_min; k + 3 <= s.k_max; ++k)
    if (s.epsilon(k + 3) < r_bar) expect = k;
  EXPECT_EQ(loc.k, expect);
  EXPECT_EQ(loc.k, -2);
  EXPECT_EQ(loc.r, s.epsilon(loc.k - 2));
}

TEST(Locality, LargeXiReducesToRadiusCondition) {
  const auto s = build_schedule_range(1.0, 0.2, 1.0, -20, 6);
  const auto loc = locality_radius(s, 0.5, 1e300, 1.0);
  EXPECT_LT(s.epsilon(loc.k + 3), 0.5);
  EXPECT_GE(s.epsilon(loc.k + 4), 0.5);
}

TEST(Locality, ConditionsHoldAtResult) {
  const auto s = build_schedule_range(2.0, 1.0, 1.0, -30, 6);
  for (double xi : {1.0, 0.1, 1e-3}) {
    const auto loc = locality_radius(s, 0.3, xi, 2.0);
    EXPECT_LT(s.epsilon(loc.k + 3), 0.3);
    EXPECT_LT(3.0 * 2.0 * s.ratio(loc.k + 1), xi);
  }
}

TEST(Locality, ExhaustedReportsDepth) {
  const auto s = build_schedule_range(1.0, 1.0, 1.0, -4, 3);
  try {
    locality_radius(s, 1e-9, 0.1, 1.0);
    FAIL() << "expected ScheduleExhausted";
  } catch (const ScheduleExhausted& e) {
    EXPECT_LT(e.required_k_min(), -4);
    const auto deeper = build_schedule_range(1.0, 1.0, 1.0, e.required_k_min(), 3);
    EXPECT_NO_THROW(locality_radius(deeper, 1e-9, 0.1, 1.0));
  }
}

TEST(Plan, CoversDiameterAndRequests) {
  const auto inst = lipext::testing::random_cloud(5);
  ScheduleRequest req;
  req.epsilon = inst.lipschitz() / 2;
  req.locality = {{0.01, 0.05}, {0.3, 0.001}};
  const auto s = plan_schedule(inst, req);
  EXPECT_GE(s.epsilon(s.k_max - 2), 2.0 * inst.diameter());
  EXPECT_NEAR(s.anchor, inst.diameter(), 0.0);
  for (const auto& l : req.locality) EXPECT_NO_THROW(locality_radius(s, l.r_bar, l.xi, inst.lipschitz()));
  EXPECT_LE(s.epsilon(s.k_min) * (s.L_eff + s.eps_eff), 1e-12 * s.L_eff * inst.diameter());
}

TEST(Plan, DepthLimit) {
  const auto inst = lipext::testing::two_point_line(11);
  ScheduleRequest req;
  req.epsilon = 1.0;
  req.locality = {{1e-250, 0.1}};
  EXPECT_THROW(plan_schedule(inst, req), ScheduleExhausted);
}

TEST(Plan, ConstantInstanceIsTrivial) {
  lipext::RawInstance raw;
  raw.geometry = DistanceMatrix{{{0, 1}, {1, 0}}};
  raw.subset = {0, 1};
  raw.values = {2, 2};
  const auto inst = validate_instance(std::move(raw));
  ScheduleRequest req;
  req.epsilon = 1.0;
  EXPECT_THROW(plan_schedule(inst, req), TrivialInstance);
}
