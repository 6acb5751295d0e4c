#include "lanechange/vehicle_c.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lanechange/errors.hpp"

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sub1 {
  Subcase subcase = Subcase::kInterior;
  double cost = kInf;
  std::optional<double> tau2;
  std::vector<ControlArc> arcs;
};

// Fixed-endpoint minimum energy on [0, T] with u in [u_min, 0], from
// (0, v0) to (X, v1).
std::optional<Sub1> subproblem_1(double v0, double X, double v1, double T,
                                 double u_min) {
  const double tol = 1e-9 * std::max(1.0, std::abs(u_min));
  const double tiny = 1e-12 * std::max(1.0, T);
  std::vector<Sub1> cs;

  {
    // u = p + q t matching both boundary conditions.
    const double dv = v1 - v0;
    const double dx = X - v0 * T;
    const double det = -T * T * T * T / 12.0;
    const double p = (dv * T * T * T / 6.0 - dx * T * T / 2.0) / det;
    const double q = (T * dx - T * T / 2.0 * dv) / det;
    const double hi = std::max(p, p + q * T);
    const double lo = std::min(p, p + q * T);
    if (hi <= tol && lo >= u_min - tol) {
      Sub1 s;
      s.subcase = Subcase::kInterior;
      s.cost = 0.5 * (p * p * T + p * q * T * T + q * q * T * T * T / 3.0);
      s.arcs.push_back(q == 0.0 ? ControlArc::constant(0.0, T, p)
                                : ControlArc::linear(0.0, T, p, q));
      cs.push_back(s);
    }
  }

  const double W = v1 - v0 - u_min * T;
  const double P = X - v0 * T - 0.5 * u_min * T * T;
  const double base = 0.5 * u_min * (2.0 * v1 - 2.0 * v0 - u_min * T);
  if (W > 0.0 && P > 0.0) {
    // u_min first, then an affine rise.
    const double s = 3.0 * P / W;
    if (s <= T + tiny) {
      const double c = 2.0 * W / (s * s);
      if (u_min + c * s <= tol) {
        Sub1 r;
        r.subcase = Subcase::kA;
        r.cost = base + 2.0 * W * W * W / (9.0 * P);
        const double tau2 = std::max(T - s, 0.0);
        r.tau2 = tau2;
        if (tau2 > tiny) r.arcs.push_back(ControlArc::constant(0.0, tau2, u_min));
        r.arcs.push_back(ControlArc::linear(tau2, T, u_min, c));
        cs.push_back(r);
      }
    }
    // Affine descent first, then u_min.
    const double Q = W * T - P;
    if (Q > 0.0) {
      const double tau2 = 3.0 * Q / W;
      if (tau2 <= T + tiny) {
        const double c = 2.0 * W / (tau2 * tau2);
        if (u_min + c * tau2 <= tol) {
          Sub1 r;
          r.subcase = Subcase::kB;
          r.cost = base + 2.0 * W * W * W / (9.0 * Q);
          const double t2 = std::min(tau2, T);
          r.tau2 = t2;
          r.arcs.push_back(ControlArc::linear(0.0, t2, u_min + c * tau2, -c));
          if (T - t2 > tiny) r.arcs.push_back(ControlArc::constant(t2, T, u_min));
          cs.push_back(r);
        }
      }
    }
  }
  if (cs.empty()) return std::nullopt;
  return *std::min_element(cs.begin(), cs.end(), [](const Sub1& a, const Sub1& b) {
    return a.cost < b.cost;
  });
}

double value_or_inf(const std::optional<ConstrainedArcSolution>& s) {
  return s ? s->cost() : kInf;
}

}  // namespace

std::string to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::kCase1:
      return "Case1";
    case CaseLabel::kCase2:
      return "Case2";
    case CaseLabel::kCase3:
      return "Case3";
    case CaseLabel::kInfeasible:
      return "Infeasible";
  }
  return "?";
}

std::string to_string(Subcase s) {
  switch (s) {
    case Subcase::kA:
      return "a";
    case Subcase::kB:
      return "b";
    case Subcase::kInterior:
      return "interior";
  }
  return "?";
}

std::string to_string(PlanLabel l) {
  switch (l) {
    case PlanLabel::kCase1:
      return "Case1";
    case PlanLabel::kCase2:
      return "Case2";
    case PlanLabel::kCase3Unconstrained:
      return "Case3-unconstrained";
    case PlanLabel::kCase3Constrained:
      return "Case3-constrained";
  }
  return "?";
}

CaseClassification classify_case(const ScenarioConfig& cfg,
                                 const TerminalSpec& spec) {
  CaseClassification c;
  c.xbar_Cf = cfg.state_C.x + cfg.state_C.v * spec.t_f;
  c.u_bound = cfg.x_U(spec.t_f) - spec.bounds.d_UC;
  c.x_Cf = spec.x_Cf;
  if (c.x_Cf >= c.u_bound) {
    c.label = CaseLabel::kInfeasible;
  } else if (c.xbar_Cf < c.x_Cf) {
    c.label = CaseLabel::kCase1;
  } else if (c.xbar_Cf < c.u_bound) {
    c.label = CaseLabel::kCase2;
  } else {
    c.label = CaseLabel::kCase3;
  }
  return c;
}

std::optional<ConstrainedArcSolution> constrained_at(const ScenarioConfig& cfg,
                                                     const TerminalSpec& spec,
                                                     double tau1) {
  const auto& lim = cfg.limits_C;
  const double vU = cfg.v_U();
  if (!(tau1 > 0.0 && tau1 < spec.t_f)) return std::nullopt;
  if (vU < lim.v_min - 1e-9 || vU > lim.v_max + 1e-9) return std::nullopt;
  const double a = cfg.x_U(tau1) - spec.bounds.d_UC;
  const double X = (cfg.state_U.x - spec.bounds.d_UC - cfg.state_C.x) + vU * tau1;
  const auto s1 = subproblem_1(cfg.state_C.v, X, vU, tau1, lim.u_min);
  if (!s1) return std::nullopt;

  OcpProblem tail{{a, vU}, lim, tau1, spec.t_f, spec.x_Cf, ControlSign::kNonpos};
  OcpSolution s2;
  try {
    s2 = solve_retard(tail);
  } catch (const OcpInfeasible&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  ConstrainedArcSolution out;
  out.tau1 = tau1;
  out.a = a;
  out.tau2 = s1->tau2;
  out.subcase = s1->subcase;
  out.J1 = s1->cost;
  out.J2 = s2.cost;
  out.tail_case = s2.case_id;
  std::vector<ControlArc> arcs = s1->arcs;
  arcs.back().t_end = tau1;
  out.traj = Trajectory(cfg.state_C, std::move(arcs)).then(s2.traj);
  return out;
}

ConstrainedArcSolution solve_constrained(const ScenarioConfig& cfg,
                                         const TerminalSpec& spec) {
  const double tf = spec.t_f;
  const double edge = 1e-6 * tf;
  auto tau_at = [&](int i) { return std::clamp(tf * i / 100.0, edge, tf - edge); };
  auto J = [&](double t) { return value_or_inf(constrained_at(cfg, spec, t)); };

  constexpr int kGrid = 101;
  std::vector<double> grid(kGrid);
  int best = -1;
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = J(tau_at(i));
    if (std::isfinite(grid[i]) && (best < 0 || grid[i] < grid[best])) best = i;
  }
  if (best < 0) {
    throw ConstrainedInfeasible("no entry time admits feasible subproblems");
  }

  // Golden section on the bracket around the grid minimum.
  double lo = tau_at(std::max(best - 1, 0));
  double hi = tau_at(std::min(best + 1, kGrid - 1));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = J(x1);
  double f2 = J(x2);
  while (hi - lo > 1e-4) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = J(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = J(x2);
    }
  }
  double tau = f1 <= f2 ? x1 : x2;
  if (!(std::min(f1, f2) < grid[best])) tau = tau_at(best);

  auto sol = constrained_at(cfg, spec, tau);
  if (!sol) throw ConstrainedInfeasible("entry-time search lost feasibility");

  const double h = 1e-4;
  const double jp = J(tau + h);
  const double jm = J(tau - h);
  if (std::isfinite(jp) && std::isfinite(jm)) {
    sol->stationarity = (jp - jm) / (2.0 * h);
  } else if (std::isfinite(jp)) {
    sol->stationarity = (jp - sol->cost()) / h;
  } else if (std::isfinite(jm)) {
    sol->stationarity = (sol->cost() - jm) / h;
  }
  return *sol;
}

const Trajectory& CPlan::traj() const {
  if (const auto* o = std::get_if<OcpSolution>(&solution)) return o->traj;
  return std::get<ConstrainedArcSolution>(solution).traj;
}

double CPlan::cost() const {
  if (const auto* o = std::get_if<OcpSolution>(&solution)) return o->cost;
  return std::get<ConstrainedArcSolution>(solution).cost();
}

double min_U_slack(const ScenarioConfig& cfg, const Trajectory& traj,
                   double d_C, int n_samples) {
  double slack = kInf;
  auto probe = [&](double t) {
    slack = std::min(slack, cfg.x_U(t) - traj.evaluate(t).x - d_C);
  };
  const int n = std::max(n_samples, 2);
  for (int i = 0; i < n; ++i) {
    probe(traj.t0() + (traj.tf() - traj.t0()) * i / (n - 1));
  }
  for (const auto& a : traj.arcs()) probe(a.t_start);
  return slack;
}

CPlan plan_C(const ScenarioConfig& cfg, const TerminalSpec& spec) {
  const auto cls = classify_case(cfg, spec);
  OcpProblem p{cfg.state_C, cfg.limits_C, 0.0, spec.t_f, spec.x_Cf,
               ControlSign::kNonneg};
  switch (cls.label) {
    case CaseLabel::kInfeasible:
      throw ManeuverAborted(
          "x_Cf is not behind x_U(t_f) - d_C; defer the maneuver");
    case CaseLabel::kCase1:
      return {PlanLabel::kCase1, solve_advance(p)};
    case CaseLabel::kCase2:
      p.sign = ControlSign::kNonpos;
      return {PlanLabel::kCase2, solve_retard(p)};
    case CaseLabel::kCase3:
      break;
  }
  p.sign = ControlSign::kNonpos;
  OcpSolution free = solve_retard(p);
  if (min_U_slack(cfg, free.traj, spec.bounds.d_UC) >= -cfg.eps_margin) {
    return {PlanLabel::kCase3Unconstrained, std::move(free)};
  }
  return {PlanLabel::kCase3Constrained, solve_constrained(cfg, spec)};
}

}  // namespace lanechange
