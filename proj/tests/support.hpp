#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "lanechange/analytic_ocp.hpp"
#include "lanechange/errors.hpp"
#include "lanechange/feasibility.hpp"
#include "lanechange/reference.hpp"
#include "lanechange/terminal.hpp"
#include "lanechange/vehicle_c.hpp"

namespace lanechange::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline VehicleLimits reference_limits() { return {-7.0, 3.3, 1.0, 33.0}; }

// Advance problem with x_f anywhere between the coast point and just inside
// the max-effort envelope.
inline OcpProblem random_advance(Rng& rng) {
  OcpProblem p;
  p.limits = reference_limits();
  p.state_0 = {uniform(rng, -50, 50), uniform(rng, 1.5, 30)};
  p.t_f = uniform(rng, 1, 25);
  p.sign = ControlSign::kNonneg;
  const double coast = p.state_0.x + p.state_0.v * p.t_f;
  const double hi = reach_envelope(p.state_0, p.limits, p.t_f).hi;
  const double f = std::pow(uniform(rng, 0, 1), 2.0);
  p.x_f = coast + f * 0.995 * (hi - coast);
  return p;
}

inline OcpProblem random_retard(Rng& rng) {
  OcpProblem p;
  p.limits = reference_limits();
  p.state_0 = {uniform(rng, -50, 50), uniform(rng, 1.5, 30)};
  p.t_f = uniform(rng, 1, 25);
  p.sign = ControlSign::kNonpos;
  const double coast = p.state_0.x + p.state_0.v * p.t_f;
  const double lo = reach_envelope(p.state_0, p.limits, p.t_f).lo;
  const double f = std::pow(uniform(rng, 0, 1), 2.0);
  p.x_f = coast - f * 0.995 * (coast - lo);
  return p;
}

// Vehicle-C instance: scenario with a fixed d_C and a terminal spec whose
// x_Cf lies behind the U bound and inside C's reach.
struct CInstance {
  ScenarioConfig cfg;
  TerminalSpec spec;
};

inline CInstance random_c_instance(Rng& rng) {
  CInstance c;
  c.cfg = reference_base();
  auto& cfg = c.cfg;
  const double vC = uniform(rng, 4, 28);
  const double dC = uniform(rng, 5, 30);
  // Half the draws have U slower than C.
  const double vU = uniform(rng, 0, 1) < 0.5 ? uniform(rng, 2, vC)
                                             : uniform(rng, 2, 30);
  cfg.safety.d_C_fixed = dC;
  cfg.state_C = {0.0, vC};
  cfg.state_U = {dC + uniform(rng, 1, 60), vU};
  cfg.state_1 = {cfg.state_U.x + 40, 15};
  cfg.state_2 = {-60, 15};
  const double tf = uniform(rng, 3, 20);
  const auto env = reach_envelope(cfg.state_C, cfg.limits_C, tf);
  const double ub = cfg.x_U(tf) - dC - 0.01;
  const double lo = env.lo + 0.002 * (env.hi - env.lo);
  const double hi = std::min(ub, env.hi - 0.002 * (env.hi - env.lo));
  const double xCf = lo < hi ? uniform(rng, lo, hi) : ub + 1.0;
  c.spec = fixed_terminal_spec(cfg, tf, cfg.x_U(tf) + 200, -60 + 15 * tf, xCf);
  return c;
}

// Full scenario in the reference geometry: 1 ahead of 2 in the target lane,
// C and U in the current lane.
inline ScenarioConfig random_scenario(Rng& rng) {
  ScenarioConfig cfg = reference_base();
  cfg.state_2 = {uniform(rng, 0, 40), uniform(rng, 8, 25)};
  cfg.state_1 = {cfg.state_2.x + uniform(rng, 20, 90), uniform(rng, 8, 25)};
  cfg.state_C = {uniform(rng, 0, 40), uniform(rng, 8, 25)};
  cfg.state_U = {cfg.state_C.x + uniform(rng, 30, 120), uniform(rng, 5, 25)};
  return cfg;
}

inline double min_control(const Trajectory& t) {
  double m = INFINITY;
  for (const auto& a : t.arcs()) m = std::min({m, a.u0, a.u_end()});
  return m;
}

inline double max_control(const Trajectory& t) {
  double m = -INFINITY;
  for (const auto& a : t.arcs()) m = std::max({m, a.u0, a.u_end()});
  return m;
}

// Number of disjoint runs of t where x_U(t) - x_C(t) - d_C <= tol.
inline int active_runs(const ScenarioConfig& cfg, const Trajectory& traj,
                       double d_C, double tol, int n = 4000) {
  int runs = 0;
  bool in = false;
  for (int k = 0; k <= n; ++k) {
    const double t = traj.t0() + (traj.tf() - traj.t0()) * k / n;
    const bool act = cfg.x_U(t) - traj.evaluate(t).x - d_C <= tol;
    if (act && !in) ++runs;
    in = act;
  }
  return runs;
}

// Endpoints of bang-then-coast controls switching on a 1e-2 s grid. The
// bang prefix is stepped with speed clamping; the reachable set is the hull
// of the endpoints.
struct BruteEnvelope {
  double lo = INFINITY;
  double hi = -INFINITY;
};

inline BruteEnvelope brute_envelope(const VehicleState& s,
                                    const VehicleLimits& lim, double t_f,
                                    double dt = 1e-2) {
  BruteEnvelope e;
  const int steps = static_cast<int>(std::llround(t_f / dt));
  for (double u : {lim.u_max, lim.u_min}) {
    double x = s.x;
    double v = s.v;
    for (int k = 0; k <= steps; ++k) {
      const double end = x + v * (t_f - k * dt);
      e.lo = std::min(e.lo, end);
      e.hi = std::max(e.hi, end);
      const double v_next = std::clamp(v + u * dt, lim.v_min, lim.v_max);
      const double tau = (v_next - v) / u;
      x += v * tau + 0.5 * u * tau * tau + v_next * (dt - tau);
      v = v_next;
    }
  }
  return e;
}

}  // namespace lanechange::testing
