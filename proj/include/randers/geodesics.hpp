#pragma once

// Geodesics x'' + 2 G(x, x') = 0 in one gnomonic chart, integrated with
// classical fixed-step RK4 on the first-order system (x' = y, y' = -2 G).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "randers/errors.hpp"
#include "randers/randers_engine.hpp"
#include "randers/s3_model.hpp"

namespace randers {

inline constexpr double kDefaultChartRadius = 10.0;

struct GeodesicState {
  ChartPoint p;
  TangentCoords y;
  double t = 0;
  double F0 = 0;  // Finslerian speed at the start of the run
};

inline GeodesicState make_geodesic_state(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                                         double t = 0) {
  return {p, y, t, finsler_F(p, y, spec)};
}

enum class GeodesicStatus { Completed, ChartExit };

inline const char* to_string(GeodesicStatus s) { return s == GeodesicStatus::Completed ? "completed" : "chart-exit"; }

struct ConservationReport {
  double max_relative_drift = 0;    // max_t |F - F0| / F0
  double final_relative_drift = 0;  // at the last state
  std::size_t steps = 0;
};

struct GeodesicRun {
  std::vector<GeodesicState> trajectory;
  GeodesicStatus status = GeodesicStatus::Completed;
  ConservationReport conservation;
  std::vector<double> speeds;  // F at each recorded state
};

struct GeodesicOptions {
  double chart_radius = kDefaultChartRadius;
  std::size_t record_every = 1;  // keep every n-th step (and the last)
};

class IntegrationBlowUp : public Error {
 public:
  IntegrationBlowUp(const std::string& what, GeodesicState last_good) : Error(what), last_good_(last_good) {}
  const GeodesicState& last_good() const { return last_good_; }

 private:
  GeodesicState last_good_;
};

/// Right-hand side G(x, y) of the geodesic equation.
using SprayFunction = std::function<Vec3(const ChartPoint&, const TangentCoords&)>;

inline SprayFunction randers_spray(const MetricSpec& spec) {
  return [spec](const ChartPoint& p, const TangentCoords& y) -> Vec3 {
    if (y.is_zero()) return {0, 0, 0};
    return spray_values(spec, p, y);
  };
}

namespace detail {

struct Phase {
  Vec3 x, v;
};

inline Phase geodesic_rhs(const SprayFunction& G, const Phase& s) {
  const Vec3 g = G({s.x[0], s.x[1], s.x[2]}, {s.v[0], s.v[1], s.v[2]});
  return {s.v, {-2 * g[0], -2 * g[1], -2 * g[2]}};
}

inline Phase axpy(const Phase& s, double h, const Phase& k) {
  Phase r;
  for (int i = 0; i < 3; ++i) {
    r.x[i] = s.x[i] + h * k.x[i];
    r.v[i] = s.v[i] + h * k.v[i];
  }
  return r;
}

inline Phase rk4_step(const SprayFunction& G, const Phase& s, double h) {
  const Phase k1 = geodesic_rhs(G, s);
  const Phase k2 = geodesic_rhs(G, axpy(s, h / 2, k1));
  const Phase k3 = geodesic_rhs(G, axpy(s, h / 2, k2));
  const Phase k4 = geodesic_rhs(G, axpy(s, h, k3));
  Phase r;
  for (int i = 0; i < 3; ++i) {
    r.x[i] = s.x[i] + h / 6 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
    r.v[i] = s.v[i] + h / 6 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
  }
  return r;
}

inline bool all_finite(const Phase& s) {
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(s.x[i]) || !std::isfinite(s.v[i])) return false;
  return true;
}

}  // namespace detail

/// Integrate from `initial` to t_end with step dt.  `speed` gives the
/// conserved quantity monitored along the run.
inline GeodesicRun integrate_geodesic(const SprayFunction& G,
                                      const std::function<double(const ChartPoint&, const TangentCoords&)>& speed,
                                      const GeodesicState& initial, double t_end, double dt,
                                      const GeodesicOptions& opts = {}) {
  if (!(dt > 0)) throw DomainError("integrate_geodesic: dt must be positive");
  if (!(opts.chart_radius > 0)) throw DomainError("integrate_geodesic: chart radius must be positive");
  if (initial.y.is_zero()) throw DomainError("integrate_geodesic: initial velocity is zero");
  if (t_end < initial.t) throw DomainError("integrate_geodesic: t_end precedes the initial time");
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);

  GeodesicRun run;
  GeodesicState cur = initial;
  if (!(cur.F0 > 0)) cur.F0 = speed(cur.p, cur.y);
  const double F0 = cur.F0;
  run.trajectory.push_back(cur);
  run.speeds.push_back(speed(cur.p, cur.y));
  const double r2max = opts.chart_radius * opts.chart_radius;

  const double span = t_end - initial.t;
  const auto n_steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  detail::Phase s{cur.p.vec(), cur.y.vec()};
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double t_next = n == n_steps ? t_end : initial.t + n * dt;
    const detail::Phase next = detail::rk4_step(G, s, t_next - cur.t);
    if (!detail::all_finite(next)) {
      throw IntegrationBlowUp("geodesic step produced non-finite values at t = " + std::to_string(t_next), cur);
    }
    s = next;
    cur = {{s.x[0], s.x[1], s.x[2]}, {s.v[0], s.v[1], s.v[2]}, t_next, F0};
    const double F = speed(cur.p, cur.y);
    const double drift = std::abs(F - F0) / F0;
    run.conservation.max_relative_drift = std::max(run.conservation.max_relative_drift, drift);
    run.conservation.final_relative_drift = drift;
    run.conservation.steps = n;
    const bool exited = s.x[0] * s.x[0] + s.x[1] * s.x[1] + s.x[2] * s.x[2] > r2max;
    if (n % every == 0 || n == n_steps || exited) {
      run.trajectory.push_back(cur);
      run.speeds.push_back(F);
    }
    if (exited) {
      run.status = GeodesicStatus::ChartExit;
      return run;
    }
  }
  return run;
}

inline GeodesicRun integrate_geodesic(const MetricSpec& spec, const GeodesicState& initial, double t_end, double dt,
                                      const GeodesicOptions& opts = {}) {
  return integrate_geodesic(
      randers_spray(spec), [spec](const ChartPoint& p, const TangentCoords& y) { return finsler_F(p, y, spec); },
      initial, t_end, dt, opts);
}

/// CSV with header t,x,y,z,u,v,w,F.
inline void write_trajectory_csv(std::ostream& os, const GeodesicRun& run) {
  os << "t,x,y,z,u,v,w,F\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const auto& s = run.trajectory[i];
    os << s.t << ',' << s.p.x << ',' << s.p.y << ',' << s.p.z << ',' << s.y.u << ',' << s.y.v << ',' << s.y.w << ','
       << run.speeds[i] << '\n';
  }
}

}  // namespace randers
