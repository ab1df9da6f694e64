#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "randers/geodesics.hpp"
#include "randers/samples.hpp"

namespace {

using namespace randers;

const ChartPoint kPoint{0.3, -0.2, 0.5};
const TangentCoords kVelocity{0.7, -0.4, 0.6};

TangentCoords with_speed(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y, double F0) {
  const double f = F0 / finsler_F(p, y, spec);
  return {f * y.u, f * y.v, f * y.w};
}

double cross_norm(const Vec3& a, const Vec3& b) {
  const Vec3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  return std::sqrt(dot(c, c));
}

// The unit-speed great circle from the origin is x = tan t; it leaves the
// radius-10 chart at t = atan 10, before t = 5.
TEST(Geodesic, RoundSphereFromOriginStaysOnGreatCircle) {
  const MetricSpec spec = MetricSpec::make(1);
  const GeodesicRun run = integrate_geodesic(spec, make_geodesic_state(spec, {0, 0, 0}, {1, 0, 0}), 5, 1e-3);
  EXPECT_EQ(run.status, GeodesicStatus::ChartExit);
  EXPECT_NEAR(run.trajectory.back().t, std::atan(10.0), 1e-3);
  EXPECT_LT(run.conservation.max_relative_drift, 1e-8);
  for (const auto& s : run.trajectory) {
    EXPECT_EQ(s.p.y, 0.0);
    EXPECT_EQ(s.p.z, 0.0);
    EXPECT_NEAR(s.p.x, std::tan(s.t), 1e-8 * (1 + std::tan(s.t) * std::tan(s.t)));
  }
}

// Great circles are the straight lines of the chart.
TEST(Geodesic, RoundSphereGeodesicsAreChartLines) {
  const MetricSpec spec = MetricSpec::make(1, +1, -1);
  for (const auto& smp : random_samples(41, 5, SampleRanges{1.0, 1.0})) {
    const TangentCoords y = with_speed(spec, smp.p, smp.y, 0.5);
    GeodesicOptions opts;
    opts.record_every = 50;
    const GeodesicRun run = integrate_geodesic(spec, make_geodesic_state(spec, smp.p, y), 2, 1e-3, opts);
    EXPECT_LT(run.conservation.max_relative_drift, 1e-8);
    const Vec3 dir = y.vec();
    for (const auto& s : run.trajectory) {
      const Vec3 d{s.p.x - smp.p.x, s.p.y - smp.p.y, s.p.z - smp.p.z};
      EXPECT_LT(cross_norm(d, dir), 1e-8 * std::max(1.0, std::sqrt(dot(d, d))));
    }
  }
}

TEST(Geodesic, SpeedConservedAtK4) {
  const MetricSpec spec = MetricSpec::make(4);
  const GeodesicRun run =
      integrate_geodesic(spec, make_geodesic_state(spec, kPoint, with_speed(spec, kPoint, kVelocity, 0.1)), 10, 1e-3);
  EXPECT_EQ(run.status, GeodesicStatus::Completed);
  EXPECT_EQ(run.conservation.steps, 10000u);
  EXPECT_LT(run.conservation.max_relative_drift, 1e-6);
}

TEST(Geodesic, UnitSpeedRandomStartsConservedUntilDoneOrChartExit) {
  const MetricSpec spec = MetricSpec::make(4);
  for (const auto& smp : random_samples(42, 4, SampleRanges{0.5, 1.0})) {
    const TangentCoords y = with_speed(spec, smp.p, smp.y, 1.0);
    const GeodesicRun run = integrate_geodesic(spec, make_geodesic_state(spec, smp.p, y), 10, 1e-3);
    EXPECT_LT(run.conservation.max_relative_drift, 1e-6);
    EXPECT_NEAR(run.speeds.front(), 1.0, 1e-15);
  }
}

TEST(Geodesic, FourthOrderConvergence) {
  const MetricSpec spec = MetricSpec::make(4);
  const GeodesicState init = make_geodesic_state(spec, kPoint, with_speed(spec, kPoint, kVelocity, 0.1));
  const double coarse = integrate_geodesic(spec, init, 10, 0.05).conservation.max_relative_drift;
  const double fine = integrate_geodesic(spec, init, 10, 0.025).conservation.max_relative_drift;
  EXPECT_NEAR(coarse / fine / 16.0, 1.0, 0.30);
}

TEST(Geodesic, ChartExitHaltsCleanly) {
  const MetricSpec spec = MetricSpec::make(4);
  GeodesicOptions opts;
  opts.chart_radius = 1.0;
  const GeodesicRun run = integrate_geodesic(spec, make_geodesic_state(spec, kPoint, kVelocity), 100, 1e-2, opts);
  EXPECT_EQ(run.status, GeodesicStatus::ChartExit);
  const auto& last = run.trajectory.back();
  EXPECT_GT(last.p.x * last.p.x + last.p.y * last.p.y + last.p.z * last.p.z, 1.0);
  EXPECT_LT(last.t, 100.0);
  EXPECT_STREQ(to_string(run.status), "chart-exit");
}

// Time reverse of the run from (p, y) is the run from (p, -y) under G(x, -y).
TEST(Geodesic, NonReversibleForKAboveOne) {
  auto separation = [](double K) {
    const MetricSpec spec = MetricSpec::make(K);
    const TangentCoords back{-kVelocity.u, -kVelocity.v, -kVelocity.w};
    const SprayFunction G = randers_spray(spec);
    const SprayFunction Grev = [G](const ChartPoint& p, const TangentCoords& y) {
      return G(p, {-y.u, -y.v, -y.w});
    };
    auto F = [spec](const ChartPoint& p, const TangentCoords& y) { return finsler_F(p, y, spec); };
    auto Frev = [spec](const ChartPoint& p, const TangentCoords& y) { return finsler_F(p, {-y.u, -y.v, -y.w}, spec); };
    const GeodesicRun a = integrate_geodesic(G, F, make_geodesic_state(spec, kPoint, back), 1, 1e-3);
    const GeodesicRun b = integrate_geodesic(Grev, Frev, {kPoint, back, 0, 0}, 1, 1e-3);
    const auto& pa = a.trajectory.back().p;
    const auto& pb = b.trajectory.back().p;
    return std::sqrt((pa.x - pb.x) * (pa.x - pb.x) + (pa.y - pb.y) * (pa.y - pb.y) + (pa.z - pb.z) * (pa.z - pb.z));
  };
  EXPECT_LT(separation(1), 1e-12);
  EXPECT_GT(separation(4), 0.1);
  EXPECT_GT(separation(29), 0.1);
}

TEST(Geodesic, DoubledVelocityTraversesSamePointsAtDoubleSpeed) {
  const MetricSpec spec = MetricSpec::make(13, -1);
  const TangentCoords y = with_speed(spec, kPoint, kVelocity, 0.2);
  const TangentCoords y2{2 * y.u, 2 * y.v, 2 * y.w};
  const GeodesicRun slow = integrate_geodesic(spec, make_geodesic_state(spec, kPoint, y), 4, 2e-3);
  const GeodesicRun fast = integrate_geodesic(spec, make_geodesic_state(spec, kPoint, y2), 2, 1e-3);
  ASSERT_EQ(slow.trajectory.size(), fast.trajectory.size());
  for (std::size_t i = 0; i < slow.trajectory.size(); ++i) {
    const auto& a = slow.trajectory[i].p;
    const auto& b = fast.trajectory[i].p;
    EXPECT_NEAR(a.x, b.x, 1e-6);
    EXPECT_NEAR(a.y, b.y, 1e-6);
    EXPECT_NEAR(a.z, b.z, 1e-6);
  }
}

TEST(Geodesic, RecordEveryKeepsLastState) {
  const MetricSpec spec = MetricSpec::make(2);
  GeodesicOptions opts;
  opts.record_every = 300;
  const GeodesicRun run = integrate_geodesic(spec, make_geodesic_state(spec, kPoint, kVelocity), 1, 1e-3, opts);
  ASSERT_EQ(run.trajectory.size(), 5u);
  EXPECT_DOUBLE_EQ(run.trajectory.back().t, 1.0);
  EXPECT_EQ(run.trajectory.size(), run.speeds.size());
}

TEST(Geodesic, TrajectoryCsv) {
  const MetricSpec spec = MetricSpec::make(2);
  GeodesicOptions opts;
  opts.record_every = 100;
  const GeodesicRun run = integrate_geodesic(spec, make_geodesic_state(spec, kPoint, kVelocity), 0.5, 1e-3, opts);
  std::ostringstream os;
  write_trajectory_csv(os, run);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x,y,z,u,v,w,F");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
  }
  EXPECT_EQ(rows, run.trajectory.size());
}

TEST(Geodesic, InvalidArguments) {
  const MetricSpec spec = MetricSpec::make(2);
  const GeodesicState s = make_geodesic_state(spec, kPoint, kVelocity);
  EXPECT_THROW(integrate_geodesic(spec, s, 1, 0), DomainError);
  EXPECT_THROW(integrate_geodesic(spec, s, 1, -1e-3), DomainError);
  EXPECT_THROW(integrate_geodesic(spec, {kPoint, {0, 0, 0}, 0, 1}, 1, 1e-3), DomainError);
  GeodesicOptions opts;
  opts.chart_radius = 0;
  EXPECT_THROW(integrate_geodesic(spec, s, 1, 1e-3, opts), DomainError);
  EXPECT_THROW(integrate_geodesic(spec, s, -1, 1e-3), DomainError);
}

TEST(Geodesic, BlowUpReportsLastGoodState) {
  int calls = 0;
  const SprayFunction G = [&calls](const ChartPoint&, const TangentCoords&) -> Vec3 {
    return ++calls > 40 ? Vec3{std::numeric_limits<double>::quiet_NaN(), 0, 0} : Vec3{0, 0, 0};
  };
  auto speed = [](const ChartPoint&, const TangentCoords& y) { return std::sqrt(dot(y.vec(), y.vec())); };
  try {
    integrate_geodesic(G, speed, {kPoint, kVelocity, 0, 0}, 1, 1e-2);
    FAIL() << "expected blow-up";
  } catch (const IntegrationBlowUp& e) {
    EXPECT_NEAR(e.last_good().t, 0.1, 1e-12);
    EXPECT_NEAR(e.last_good().p.x, kPoint.x + 0.1 * kVelocity.u, 1e-12);
  }
}

}  // namespace
