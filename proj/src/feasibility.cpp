#include "lanechange/feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "lanechange/errors.hpp"

namespace lanechange {

std::string to_string(Violation v) {
  switch (v) {
    case Violation::kCannotReachI:
      return "CannotReach-i";
    case Violation::kCannotReachII:
      return "CannotReach-ii";
    case Violation::kOvershootIII:
      return "Overshoot-iii";
    case Violation::kOvershootIV:
      return "Overshoot-iv";
    case Violation::kUSafetyBound:
      return "USafetyBound";
  }
  return "unknown";
}

ReachEnvelope reach_envelope(const VehicleState& s, const VehicleLimits& lim,
                             double t_f) {
  auto travel = [&](double u, double v_lim) {
    const double ts = (v_lim - s.v) / u;
    if (ts <= 0.0) return s.v * t_f;
    if (t_f <= ts) return s.v * t_f + 0.5 * u * t_f * t_f;
    return (v_lim * v_lim - s.v * s.v) / (2.0 * u) + v_lim * (t_f - ts);
  };
  return {s.x + travel(lim.u_min, lim.v_min), s.x + travel(lim.u_max, lim.v_max)};
}

FeasibilityVerdict classify(const VehicleState& s, const VehicleLimits& l,
                            double x_f, double t_f) {
  const double dx = x_f - s.x;
  const double v0 = s.v;
  if (l.u_max * t_f + v0 <= l.v_max &&
      v0 * t_f + 0.5 * l.u_max * t_f * t_f < dx) {
    return FeasibilityVerdict::fail(Violation::kCannotReachI);
  }
  if (l.u_max * t_f + v0 > l.v_max &&
      l.v_max * (t_f - (l.v_max - v0) / l.u_max) <
          dx - (l.v_max * l.v_max - v0 * v0) / (2.0 * l.u_max)) {
    return FeasibilityVerdict::fail(Violation::kCannotReachII);
  }
  if (l.u_min * t_f + v0 >= l.v_min &&
      v0 * t_f + 0.5 * l.u_min * t_f * t_f > dx) {
    return FeasibilityVerdict::fail(Violation::kOvershootIII);
  }
  if (l.u_min * t_f + v0 < l.v_min &&
      l.v_min * (t_f - (l.v_min - v0) / l.u_min) >
          dx - (l.v_min * l.v_min - v0 * v0) / (2.0 * l.u_min)) {
    return FeasibilityVerdict::fail(Violation::kOvershootIV);
  }
  return FeasibilityVerdict::ok();
}

FeasibilityVerdict check_C_safety_bound(const ScenarioConfig& cfg,
                                        double x_Cf, double t_f, double d_C) {
  const double slack = cfg.x_U(t_f) - d_C - x_Cf;
  if (slack <= 0.5 * cfg.eps_margin) {
    return FeasibilityVerdict::fail(Violation::kUSafetyBound);
  }
  return FeasibilityVerdict::ok();
}

FeasibilityVerdict check_C_safety_bound(const ScenarioConfig& cfg,
                                        const TerminalSpec& spec) {
  return check_C_safety_bound(cfg, spec.x_Cf, spec.t_f, spec.bounds.d_UC);
}

FeasibilityVerdict check_spec(const ScenarioConfig& cfg,
                              const TerminalSpec& spec) {
  for (const auto& v :
       {classify(cfg.state_1, cfg.limits_1, spec.x_1f, spec.t_f),
        classify(cfg.state_2, cfg.limits_2, spec.x_2f, spec.t_f),
        classify(cfg.state_C, cfg.limits_C, spec.x_Cf, spec.t_f),
        check_C_safety_bound(cfg, spec)}) {
    if (!v.feasible) return v;
  }
  return FeasibilityVerdict::ok();
}

RelaxResult relax_from_time(const ScenarioConfig& cfg, double t0, Branch b,
                            const RelaxOptions& opts) {
  double t = t0;
  double beta = 1.0;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    beta *= cfg.beta0;
    t *= beta;
    if (t > cfg.T_max) {
      throw RelaxationFailed("relaxation exceeded T_max");
    }
    try {
      TerminalSpec next = terminal_positions(cfg, t, b);
      if (check_spec(cfg, next).feasible) return {next, k};
    } catch (const TerminalInfeasible&) {
    }
  }
  throw RelaxationFailed("relaxation exceeded the iteration limit");
}

RelaxResult relax_until_feasible(const ScenarioConfig& cfg,
                                 const TerminalSpec& spec,
                                 const RelaxOptions& opts) {
  if (check_spec(cfg, spec).feasible) return {spec, 0};
  return relax_from_time(cfg, spec.t_f, spec.branch, opts);
}

}  // namespace lanechange
