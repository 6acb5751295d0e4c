#include "lanechange/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "lanechange/errors.hpp"
#include "lanechange/oracle.hpp"

namespace lanechange {

namespace {

VehicleSummary summarize(const std::string& name, double cost,
                         const std::string& case_id) {
  VehicleSummary s;
  s.name = name;
  s.case_id = case_id;
  s.energy_half = cost;
  s.energy_full = 2.0 * cost;
  return s;
}

VehicleSummary summarize(const std::string& name, const OcpSolution& sol) {
  VehicleSummary s = summarize(name, sol.cost, to_string(sol.case_id));
  s.t1 = sol.t1;
  s.tau = sol.tau;
  return s;
}

void cross_check(VehicleSummary& s, const TranscribedProblem& p) {
  try {
    const auto o = solve_qp(p);
    s.oracle_energy = o.cost;
    s.oracle_delta = oracle_delta(s.energy_half, o.cost);
  } catch (const std::exception& e) {
    s.oracle_error = e.what();
  }
}

double weight_u(const VehicleLimits& l, double rho) {
  return (1.0 - rho) / std::max(l.u_max * l.u_max, l.u_min * l.u_min);
}

}  // namespace

double PlanReport::total_energy_half() const {
  return vehicles[0].energy_half + vehicles[1].energy_half +
         vehicles[2].energy_half;
}

double PlanReport::total_energy_full() const {
  return 2.0 * total_energy_half();
}

double oracle_delta(double analytic, double oracle) {
  return std::abs(analytic - oracle) / std::max(oracle, 1e-9);
}

PlanReport plan_maneuver(const ScenarioConfig& cfg,
                         const PlanOverrides& overrides,
                         const PlanOptions& opts) {
  cfg.validate();
  PlanReport rep;

  double t_f = 0.0;
  Branch branch = Branch::kAccelerate;
  if (overrides.t_f) {
    if (!(*overrides.t_f > 0.0)) throw InvalidScenario("override t_f <= 0");
    t_f = *overrides.t_f;
  } else {
    rep.timing = min_terminal_time(cfg);
    t_f = rep.timing->t_f;
    branch = rep.timing->branch;
  }

  TerminalSpec spec;
  if (overrides.terminal) {
    const auto& xf = *overrides.terminal;
    spec = fixed_terminal_spec(cfg, t_f, xf[0], xf[1], xf[2]);
    const auto verdict = check_spec(cfg, spec);
    if (!verdict.feasible) {
      throw ManeuverAborted("fixed terminal state is infeasible: " +
                            to_string(*verdict.violation));
    }
  } else {
    RelaxResult relaxed;
    try {
      relaxed = relax_until_feasible(cfg, terminal_positions(cfg, t_f, branch));
    } catch (const TerminalInfeasible&) {
      relaxed = relax_from_time(cfg, t_f, branch);
    }
    spec = relaxed.spec;
    rep.relax_iterations = relaxed.iterations;
  }

  ManeuverPlan& plan = rep.plan;
  plan.terminal = spec;
  // With fixed terminal positions the sign follows the displacement.
  auto sign_for = [&](double delta, ControlSign dflt) {
    if (!overrides.terminal) return dflt;
    return delta >= 0.0 ? ControlSign::kNonneg : ControlSign::kNonpos;
  };
  const OcpProblem p1{cfg.state_1, cfg.limits_1, 0.0, spec.t_f, spec.x_1f,
                      sign_for(spec.delta_x[0], ControlSign::kNonneg)};
  const OcpProblem p2{cfg.state_2, cfg.limits_2, 0.0, spec.t_f, spec.x_2f,
                      sign_for(spec.delta_x[1], ControlSign::kNonpos)};
  const OcpSolution s1 = solve_ocp(p1);
  const OcpSolution s2 = solve_ocp(p2);
  rep.classification = classify_case(cfg, spec);
  const CPlan sc = plan_C(cfg, spec);

  plan.traj_1 = s1.traj;
  plan.traj_2 = s2.traj;
  plan.traj_C = sc.traj();
  plan.energy_1 = s1.cost;
  plan.energy_2 = s2.cost;
  plan.energy_C = sc.cost();
  plan.case_label = sc.label;
  plan.audit = audit_safety(plan, cfg, opts.n_samples);

  rep.vehicles[0] = summarize("1", s1);
  rep.vehicles[1] = summarize("2", s2);
  if (const auto* o = std::get_if<OcpSolution>(&sc.solution)) {
    rep.vehicles[2] = summarize("C", *o);
  } else {
    const auto& c = std::get<ConstrainedArcSolution>(sc.solution);
    rep.constrained = c;
    rep.vehicles[2] = summarize("C", c.cost(), to_string(sc.label));
    rep.vehicles[2].t1 = c.tau1;
    rep.vehicles[2].tau = c.tau2;
  }
  rep.vehicles[2].case_id = to_string(sc.label) + "/" + rep.vehicles[2].case_id;
  if (sc.label == PlanLabel::kCase3Constrained) {
    rep.vehicles[2].case_id = to_string(sc.label);
    rep.advice =
        "safety constraint to U is active; the maneuver may be deferred";
  }

  rep.w_t = cfg.rho / cfg.T_max;
  rep.weighted_cost = rep.w_t * spec.t_f +
                      2.0 * (weight_u(cfg.limits_1, cfg.rho) * plan.energy_1 +
                             weight_u(cfg.limits_2, cfg.rho) * plan.energy_2 +
                             weight_u(cfg.limits_C, cfg.rho) * plan.energy_C);

  if (opts.run_oracle) {
    rep.oracle_checked = true;
    cross_check(rep.vehicles[0], TranscribedProblem::from_ocp(p1, opts.oracle_n));
    cross_check(rep.vehicles[1], TranscribedProblem::from_ocp(p2, opts.oracle_n));
    OcpProblem pc{cfg.state_C, cfg.limits_C, 0.0, spec.t_f, spec.x_Cf,
                  sc.label == PlanLabel::kCase1 ? ControlSign::kNonneg
                                                : ControlSign::kNonpos};
    auto tc = TranscribedProblem::from_ocp(pc, opts.oracle_n);
    tc.safety = SafetyRows{cfg.state_U.x, cfg.v_U(), spec.bounds.d_UC};
    cross_check(rep.vehicles[2], tc);
    rep.oracle_ok = std::all_of(
        rep.vehicles.begin(), rep.vehicles.end(), [&](const VehicleSummary& v) {
          return v.oracle_delta && *v.oracle_delta <= opts.tolerance;
        });
  }
  rep.verdict_ok = plan.audit.pass && rep.oracle_ok;
  return rep;
}

}  // namespace lanechange
