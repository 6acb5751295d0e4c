#include "lanechange/analytic_ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lanechange/errors.hpp"

namespace lanechange {

namespace {

// Arc in horizon-relative time for the advance-normalized problem.
struct RelArc {
  double a = 0.0;
  double b = 0.0;
  double u0 = 0.0;
  double slope = 0.0;
};

struct Candidate {
  OcpCase id = OcpCase::kV;
  double cost = 0.0;
  std::optional<double> t1;
  std::optional<double> tau;
  std::vector<RelArc> arcs;
};

int saturation_rank(OcpCase c) {
  switch (c) {
    case OcpCase::kV:
      return 0;
    case OcpCase::kIV:
    case OcpCase::kIII:
      return 1;
    case OcpCase::kII:
      return 2;
    case OcpCase::kI:
      return 3;
  }
  return 4;
}

// Advance problem on [0, T] with displacement D.
std::vector<Candidate> advance_candidates(double v0, double T, double D,
                                          double umax, double vmax) {
  std::vector<Candidate> out;
  const double E = D - v0 * T;
  const double tol_u = 1e-9 * umax;
  const double tol_v = 1e-9 * std::max(1.0, std::abs(vmax));
  const double tol_t = 1e-12 * T;
  const double tiny_s = 1e-9 * T;

  if (E == 0.0) {
    out.push_back({OcpCase::kV, 0.0, {}, {}, {{0.0, T, 0.0, 0.0}}});
    return out;
  }

  // V: u = c (T - t).
  {
    const double c = 3.0 * E / (T * T * T);
    if (c * T <= umax + tol_u && v0 + 1.5 * E / T <= vmax + tol_v) {
      out.push_back({OcpCase::kV, 1.5 * E * E / (T * T * T), {}, {},
                     {{0.0, T, c * T, -c}}});
    }
  }

  const double L = vmax * T - D;
  const double dv = vmax - v0;

  // IV: u = k (tau - t), then coast at vmax.
  if (dv > 0.0) {
    const double tau = 3.0 * L / dv;
    if (tau > 0.0 && tau <= T + tol_t) {
      const double k = 2.0 * dv / (tau * tau);
      if (k * tau <= umax + tol_u) {
        Candidate c{OcpCase::kIV, 2.0 / 3.0 * dv * dv / tau, {}, tau, {}};
        const double te = std::min(tau, T);
        c.arcs.push_back({0.0, te, k * tau, -k});
        if (T - te > tol_t) c.arcs.push_back({te, T, 0.0, 0.0});
        out.push_back(c);
      }
    }
  }

  // III: umax on [0, t1], ramp to 0 at T.
  {
    const double s2 = 3.0 * T * T - 6.0 * E / umax;
    if (s2 >= -1e-12 * T * T) {
      const double s = std::sqrt(std::max(s2, 0.0));
      const double t1 = T - s;
      if (t1 >= -tol_t && v0 + umax * (T + std::max(t1, 0.0)) / 2.0 <= vmax + tol_v) {
        const double tc = std::clamp(t1, 0.0, T);
        Candidate c;
        c.cost = umax * umax * (T + 2.0 * tc) / 6.0;
        c.t1 = tc;
        if (s <= tiny_s) {
          c.id = OcpCase::kI;
          c.arcs.push_back({0.0, T, umax, 0.0});
          c.cost = 0.5 * umax * umax * T;
        } else {
          c.id = OcpCase::kIII;
          if (tc > tol_t) c.arcs.push_back({0.0, tc, umax, 0.0});
          c.arcs.push_back({tc, T, umax, -umax / (T - tc)});
        }
        out.push_back(c);
      }
    }
  }

  // II: umax on [0, t1], ramp to 0 at tau reaching vmax, then coast.
  if (dv > 0.0) {
    const double S = 2.0 * dv / umax;
    const double s2 = 24.0 * L / umax - 3.0 * S * S;
    if (s2 >= -1e-12 * std::max(1.0, S * S)) {
      const double s = std::sqrt(std::max(s2, 0.0));
      const double t1 = (S - s) / 2.0;
      const double tau = t1 + s;
      if (t1 >= -tol_t && tau <= T + tol_t) {
        const double tc = std::max(t1, 0.0);
        const double te = std::min(tau, T);
        Candidate c;
        c.t1 = tc;
        c.tau = te;
        if (s <= tiny_s) {
          c.id = OcpCase::kI;
          c.cost = 0.5 * umax * dv;
          if (tc > tol_t) c.arcs.push_back({0.0, tc, umax, 0.0});
        } else {
          c.id = OcpCase::kII;
          c.cost = 0.5 * tc * umax * umax + umax * umax * s / 6.0;
          if (tc > tol_t) c.arcs.push_back({0.0, tc, umax, 0.0});
          c.arcs.push_back({tc, te, umax, -umax / s});
        }
        if (T - te > tol_t) c.arcs.push_back({te, T, 0.0, 0.0});
        if (!c.arcs.empty()) out.push_back(c);
      }
    }
  }
  return out;
}

const Candidate& pick(const std::vector<Candidate>& cs) {
  const Candidate* best = &cs.front();
  for (const auto& c : cs) {
    const double tie = 1e-9 * std::max(1.0, std::abs(best->cost));
    if (c.cost < best->cost - tie ||
        (std::abs(c.cost - best->cost) <= tie &&
         saturation_rank(c.id) < saturation_rank(best->id))) {
      best = &c;
    }
  }
  return *best;
}

void check_problem(const OcpProblem& p) {
  if (!(p.t_f > p.t_0)) throw std::invalid_argument("ocp: t_f <= t_0");
  if (!std::isfinite(p.x_f) || !std::isfinite(p.state_0.x) ||
      !std::isfinite(p.state_0.v)) {
    throw std::invalid_argument("ocp: non-finite data");
  }
}

OcpSolution build(const OcpProblem& p, const Candidate& c, double sign) {
  std::vector<ControlArc> arcs;
  for (const auto& r : c.arcs) {
    const double a = p.t_0 + r.a;
    const double b = p.t_0 + r.b;
    if (r.slope == 0.0) {
      arcs.push_back(ControlArc::constant(a, b, sign * r.u0));
    } else {
      arcs.push_back(ControlArc::linear(a, b, sign * r.u0, sign * r.slope));
    }
  }
  arcs.front().t_start = p.t_0;
  arcs.back().t_end = p.t_f;
  OcpSolution sol;
  sol.traj = Trajectory(p.state_0, std::move(arcs));
  sol.cost = c.cost;
  sol.case_id = c.id;
  if (c.t1) sol.t1 = p.t_0 + *c.t1;
  if (c.tau) sol.tau = p.t_0 + *c.tau;
  return sol;
}

OcpCase mirror_label(const Candidate& c) {
  switch (c.id) {
    case OcpCase::kII:
      return OcpCase::kI;
    case OcpCase::kIII:
      return OcpCase::kII;
    case OcpCase::kIV:
      return OcpCase::kIII;
    case OcpCase::kV:
      return OcpCase::kIV;
    case OcpCase::kI:
      return c.tau ? OcpCase::kI : OcpCase::kII;
  }
  return c.id;
}

}  // namespace

std::string to_string(OcpCase c) {
  switch (c) {
    case OcpCase::kI:
      return "I";
    case OcpCase::kII:
      return "II";
    case OcpCase::kIII:
      return "III";
    case OcpCase::kIV:
      return "IV";
    case OcpCase::kV:
      return "V";
  }
  return "?";
}

double interior_cost(const OcpProblem& p) {
  const double T = p.t_f - p.t_0;
  const double E = p.x_f - p.state_0.x - p.state_0.v * T;
  return 1.5 * E * E / (T * T * T);
}

OcpSolution solve_advance(const OcpProblem& p) {
  check_problem(p);
  const double T = p.t_f - p.t_0;
  double D = p.x_f - p.state_0.x;
  const double E = D - p.state_0.v * T;
  const double tol = 1e-9 * std::max(1.0, std::abs(D));
  if (E < -tol) {
    throw std::invalid_argument("solve_advance: x_f behind the coast point");
  }
  if (E <= tol) D = p.state_0.v * T;
  if (p.state_0.v > p.limits.v_max + 1e-9) {
    throw OcpInfeasible("solve_advance: initial speed above v_max");
  }
  const auto cs = advance_candidates(p.state_0.v, T, D, p.limits.u_max,
                                     p.limits.v_max);
  if (cs.empty()) throw OcpInfeasible("solve_advance: x_f not reachable");
  const Candidate& c = pick(cs);
  OcpSolution sol = build(p, c, 1.0);
  if (c.id == OcpCase::kV && E > tol) sol.cost = interior_cost(p);
  return sol;
}

OcpSolution solve_retard(const OcpProblem& p) {
  check_problem(p);
  const double T = p.t_f - p.t_0;
  double D = p.x_f - p.state_0.x;
  const double E = D - p.state_0.v * T;
  const double tol = 1e-9 * std::max(1.0, std::abs(D));
  if (E > tol) {
    throw std::invalid_argument("solve_retard: x_f ahead of the coast point");
  }
  if (E >= -tol) D = p.state_0.v * T;
  if (p.state_0.v < p.limits.v_min - 1e-9) {
    throw OcpInfeasible("solve_retard: initial speed below v_min");
  }
  auto cs = advance_candidates(-p.state_0.v, T, -D, -p.limits.u_min,
                               -p.limits.v_min);
  if (cs.empty()) throw OcpInfeasible("solve_retard: x_f not reachable");
  Candidate c = pick(cs);
  c.id = mirror_label(c);
  OcpSolution sol = build(p, c, -1.0);
  if (c.id == OcpCase::kIV && E < -tol) sol.cost = interior_cost(p);
  return sol;
}

OcpSolution solve_ocp(const OcpProblem& p) {
  return p.sign == ControlSign::kNonneg ? solve_advance(p) : solve_retard(p);
}

}  // namespace lanechange
