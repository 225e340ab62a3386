#include <gtest/gtest.h>

#include "lipext/energy.hpp"
#include "random_instances.hpp"

using namespace lipext;

namespace {

MeasureData unit_ends(const MetricInstance& inst, double p) {
  MeasureData m;
  m.masses.assign(inst.size(), 0.0);
  for (Index c : inst.subset()) m.masses[c] = 1.0;
  m.p = p;
  return m;
}

}  // namespace

TEST(Energy, ConstantIsZero) {
  const auto inst = lipext::testing::two_point_line(11);
  const auto all = inst.all_indices();
  const std::vector<double> flat(inst.size(), 3.0);
  for (double p : {1.0, 2.0, 3.5})
    for (double r : {0.1, 0.5, 2.0}) EXPECT_EQ(energy(inst, flat, all, unit_ends(inst, p), r).total, 0.0);
}

TEST(Energy, SingleMassIsLocalLipschitz) {
  EuclideanPoints pts;
  for (int i = 0; i <= 10; ++i) pts.coords.push_back({i / 10.0});
  RawInstance raw;
  raw.geometry = std::move(pts);
  raw.subset = {0, 5, 10};
  raw.values = {0.0, 0.2, 1.0};
  const auto inst = validate_instance(std::move(raw));
  const auto all = inst.all_indices();
  std::vector<double> h(inst.size());
  for (Index y : all) h[y] = (y % 2) ? 0.3 * y : 0.0;
  MeasureData m;
  m.masses.assign(inst.size(), 0.0);
  m.masses[5] = 1.0;
  m.p = 1.0;
  const auto rep = energy(inst, h, all, m, 0.25);
  const auto ball = ball_members(inst, 5, 0.25, all);
  std::vector<double> hv;
  for (Index b : ball) hv.push_back(h[b]);
  EXPECT_EQ(rep.total, lip_constant(inst, hv, ball));
  EXPECT_EQ(rep.support, std::vector<Index>{5});
}

TEST(Energy, TwoPointLineMcShane) {
  const auto inst = lipext::testing::two_point_line(1001);
  const auto all = inst.all_indices();
  std::vector<double> f(inst.size());
  for (Index y : all) f[y] = mcshane_upper(inst, 1.0, y);
  const auto m = unit_ends(inst, 2.0);
  EXPECT_NEAR(energy(inst, f, all, m, 0.5).total, 2.0, 1e-12);
  const auto c = inst.subset();
  const std::vector<Index> cs(c.begin(), c.end());
  const std::vector<double> g(inst.values().begin(), inst.values().end());
  EXPECT_EQ(energy(inst, g, cs, m, 0.5).total, 0.0);
  const std::vector<double> radii{0.5};
  const auto mono = check_restriction_monotonicity(inst, f, m, radii);
  EXPECT_TRUE(mono.check.passed());
  EXPECT_LT(mono.on_c[0].total, mono.on_x[0].total);
}

TEST(Energy, ExtensionEnergyOnTwoPointLine) {
  const auto inst = lipext::testing::two_point_line(1001);
  ScheduleRequest req;
  req.epsilon = 1.0;
  req.locality = {{0.5, 0.1}};
  const ExtensionModel model(inst, plan_schedule(inst, req));
  const auto all = inst.all_indices();
  const auto field = extend(model, all);
  const std::vector<double> r_bars{0.5};
  const auto res = check_extension_energy(model, field, unit_ends(inst, 1.0), r_bars, 0.1);
  EXPECT_TRUE(res.check.passed());
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_LE(res.rows[0].on_x.total, 0.2);
  EXPECT_NEAR(res.rows[0].bound, 0.2, 1e-15);
}

TEST(Energy, MonotonicityOnRandomInstances) {
  for (std::uint64_t s = 70; s < 75; ++s) {
    const auto inst = lipext::testing::random_cloud(s, {10, 60, 2, 20, 1, 3});
    std::vector<double> h(inst.size());
    for (Index y = 0; y < inst.size(); ++y) h[y] = std::sin(0.7 * static_cast<double>(y));
    MeasureData m = unit_ends(inst, 1.5);
    const std::vector<double> radii{0.1, 0.4, 1.2};
    EXPECT_TRUE(check_restriction_monotonicity(inst, h, m, radii).check.passed());
  }
}

TEST(Energy, MeasureValidation) {
  const auto inst = lipext::testing::two_point_line(5);
  MeasureData m = unit_ends(inst, 1.0);
  EXPECT_NO_THROW(validate_measure(inst, m));
  m.masses[2] = 1.0;  // off C
  EXPECT_THROW(validate_measure(inst, m), InvalidArgument);
  m = unit_ends(inst, 0.5);
  EXPECT_THROW(validate_measure(inst, m), InvalidArgument);
  m = unit_ends(inst, 1.0);
  m.masses[0] = -1.0;
  EXPECT_THROW(validate_measure(inst, m), InvalidArgument);
  m.masses.pop_back();
  EXPECT_THROW(validate_measure(inst, m), InvalidArgument);
}
