#include "lanechange/terminal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "lanechange/errors.hpp"

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Quad {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double at(double t) const { return c0 + t * (c1 + t * c2); }
};

// Piecewise quadratic on [0, inf); pieces.size() == breaks.size() + 1.
struct Piecewise {
  std::vector<double> breaks;
  std::vector<Quad> pieces;

  std::size_t index(double t) const {
    return std::upper_bound(breaks.begin(), breaks.end(), t) - breaks.begin();
  }
  double at(double t) const { return pieces[index(t)].at(t); }
};

Piecewise constant_piece(Quad q) { return {{}, {q}}; }

Piecewise combine(const Piecewise& a, double sa, const Piecewise& b,
                  double sb) {
  Piecewise out;
  std::merge(a.breaks.begin(), a.breaks.end(), b.breaks.begin(),
             b.breaks.end(), std::back_inserter(out.breaks));
  out.breaks.erase(std::unique(out.breaks.begin(), out.breaks.end()),
                   out.breaks.end());
  for (std::size_t i = 0; i <= out.breaks.size(); ++i) {
    const double lo = i == 0 ? 0.0 : out.breaks[i - 1];
    const double hi = i == out.breaks.size() ? lo + 2.0 : out.breaks[i];
    const double mid = 0.5 * (lo + hi);
    const Quad& qa = a.pieces[a.index(mid)];
    const Quad& qb = b.pieces[b.index(mid)];
    out.pieces.push_back({sa * qa.c0 + sb * qb.c0, sa * qa.c1 + sb * qb.c1,
                          sa * qa.c2 + sb * qb.c2});
  }
  return out;
}

struct Motion {
  Piecewise x;
  Piecewise v;
};

// Constant acceleration a from s, with speed held once it reaches the limit.
Motion clamped_motion(const VehicleState& s, double a,
                      const VehicleLimits& lim) {
  const double v_lim = a > 0.0 ? lim.v_max : lim.v_min;
  const bool coast = a == 0.0 || (a > 0.0 && s.v >= v_lim) ||
                     (a < 0.0 && s.v <= v_lim);
  if (coast) {
    return {constant_piece({s.x, s.v, 0.0}), constant_piece({s.v, 0.0, 0.0})};
  }
  const double ts = (v_lim - s.v) / a;
  const double xs = s.x + s.v * ts + 0.5 * a * ts * ts;
  Motion m;
  m.x = {{ts}, {{s.x, s.v, 0.5 * a}, {xs - v_lim * ts, v_lim, 0.0}}};
  m.v = {{ts}, {{s.v, a, 0.0}, {v_lim, 0.0, 0.0}}};
  return m;
}

// x_lead - x_follow - d, where d = phi * v_ref + delta unless fixed.
Piecewise gap(const Motion& lead, const Motion& follow, const Motion& ref,
              const SafetyModel& model, bool use_fixed) {
  Piecewise g = combine(lead.x, 1.0, follow.x, -1.0);
  if (use_fixed && model.d_C_fixed) {
    return combine(g, 1.0, constant_piece({*model.d_C_fixed, 0.0, 0.0}),
                   -1.0);
  }
  Piecewise d = combine(ref.v, model.phi,
                        constant_piece({model.delta, 0.0, 0.0}), 1.0);
  return combine(g, 1.0, d, -1.0);
}

std::vector<Piecewise> branch_constraints(const ScenarioConfig& cfg,
                                          Branch b) {
  const Motion m1 =
      clamped_motion(cfg.state_1, cfg.alpha_1 * cfg.limits_1.u_max,
                     cfg.limits_1);
  const Motion m2 =
      clamped_motion(cfg.state_2, cfg.alpha_2 * cfg.limits_2.u_min,
                     cfg.limits_2);
  const Motion mU = {constant_piece({cfg.state_U.x, cfg.state_U.v, 0.0}),
                     constant_piece({cfg.state_U.v, 0.0, 0.0})};
  if (b == Branch::kAccelerate) {
    const Motion mC =
        clamped_motion(cfg.state_C, cfg.alpha_C * cfg.limits_C.u_max,
                       cfg.limits_C);
    return {gap(m1, mC, mC, cfg.safety, true),
            gap(mC, m2, m2, cfg.safety, false)};
  }
  const Motion mC = clamped_motion(
      cfg.state_C, cfg.alpha_C * cfg.limits_C.u_min, cfg.limits_C);
  return {gap(mU, mC, mC, cfg.safety, true),
          gap(mC, m2, m2, cfg.safety, false)};
}

std::vector<double> quadratic_roots(double c0, double c1, double c2) {
  std::vector<double> r;
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
  if (scale == 0.0) return r;
  if (std::abs(c2) <= 1e-14 * scale) {
    if (std::abs(c1) > 1e-14 * scale) r.push_back(-c0 / c1);
    return r;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return r;
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  r.push_back(q / c2);
  if (q != 0.0) r.push_back(c0 / q);
  std::sort(r.begin(), r.end());
  return r;
}

using Intervals = std::vector<std::pair<double, double>>;

// Closed intervals of [0, t_hi] where g >= level.
Intervals superlevel(const Piecewise& g, double level, double t_hi) {
  Intervals out;
  for (std::size_t i = 0; i < g.pieces.size(); ++i) {
    const double lo = i == 0 ? 0.0 : g.breaks[i - 1];
    const double hi = std::min(i == g.breaks.size() ? kInf : g.breaks[i], t_hi);
    if (!(hi > lo)) continue;
    const Quad& q = g.pieces[i];
    std::vector<double> pts{lo};
    for (double r : quadratic_roots(q.c0 - level, q.c1, q.c2)) {
      if (r > lo && r < hi) pts.push_back(r);
    }
    pts.push_back(hi);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double mid = 0.5 * (pts[k] + pts[k + 1]);
      if (q.at(mid) < level) continue;
      if (!out.empty() && out.back().second >= pts[k]) {
        out.back().second = pts[k + 1];
      } else {
        out.emplace_back(pts[k], pts[k + 1]);
      }
    }
  }
  return out;
}

Intervals intersect(const Intervals& a, const Intervals& b) {
  Intervals out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].first, b[j].first);
    const double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) out.emplace_back(lo, hi);
    if (a[i].second < b[j].second) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

double min_slack(const std::vector<Piecewise>& gs, double t, double eps) {
  double s = kInf;
  for (const auto& g : gs) s = std::min(s, g.at(t) - eps);
  return s;
}

Branch implied_branch(const ScenarioConfig& cfg, double t_f, double x_Cf) {
  const double coast = cfg.state_C.x + cfg.state_C.v * t_f;
  return x_Cf > coast ? Branch::kAccelerate : Branch::kDecelerate;
}

}  // namespace

std::string to_string(Branch b) {
  return b == Branch::kAccelerate ? "C-accelerates" : "C-decelerates";
}

double TerminalSpec::cost() const {
  return delta_x[0] * delta_x[0] + delta_x[1] * delta_x[1] +
         delta_x[2] * delta_x[2];
}

double branch_slack(const ScenarioConfig& cfg, Branch b, double t) {
  return min_slack(branch_constraints(cfg, b), t, cfg.eps_margin);
}

std::optional<double> branch_min_time(const ScenarioConfig& cfg, Branch b) {
  const auto gs = branch_constraints(cfg, b);
  Intervals set{{0.0, cfg.T_max}};
  for (const auto& g : gs) {
    set = intersect(set, superlevel(g, cfg.eps_margin, cfg.T_max));
  }
  for (const auto& [lo, hi] : set) {
    if (hi < cfg.min_horizon) continue;
    double t = std::max(lo, cfg.min_horizon);
    // Root rounding can land just outside the set.
    for (int k = 0; k < 60 && min_slack(gs, t, cfg.eps_margin) < 0.0; ++k) {
      t = std::min(hi, t + 1e-12 * std::max(1.0, t) * std::ldexp(1.0, k));
    }
    if (min_slack(gs, t, cfg.eps_margin) >= 0.0) return t;
  }
  return std::nullopt;
}

TerminalTime min_terminal_time(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  constexpr int kRounds = 5;
  auto bump = [](double a) { return std::max(a, std::min(a + 0.1, 0.9)); };
  for (int round = 0; round <= kRounds; ++round) {
    const auto ta = branch_min_time(c, Branch::kAccelerate);
    const auto td = branch_min_time(c, Branch::kDecelerate);
    if (ta || td) {
      TerminalTime out;
      if (ta && (!td || *ta <= *td)) {
        out.t_f = *ta;
        out.branch = Branch::kAccelerate;
      } else {
        out.t_f = *td;
        out.branch = Branch::kDecelerate;
      }
      out.alpha = {c.alpha_1, c.alpha_2, c.alpha_C};
      out.alpha_rounds = round;
      out.floored = out.t_f == c.min_horizon;
      return out;
    }
    c.alpha_1 = bump(c.alpha_1);
    c.alpha_2 = bump(c.alpha_2);
    c.alpha_C = bump(c.alpha_C);
  }
  throw ManeuverAborted("no feasible terminal time within T_max");
}

SpacingBounds resolve_spacing_bounds(const ScenarioConfig& cfg, double t_f,
                                     Branch b) {
  SpacingBounds out;
  out.d_C2 = safe_distance(cfg.state_2.v, cfg.safety);
  double dC = 0.0;
  if (cfg.safety.d_C_fixed) {
    dC = *cfg.safety.d_C_fixed;
  } else if (b == Branch::kAccelerate) {
    const double v = std::min(cfg.state_C.v + cfg.limits_C.u_max * t_f,
                              cfg.limits_C.v_max);
    dC = safe_distance(v, cfg.safety);
  } else {
    dC = safe_distance(cfg.state_C.v, cfg.safety);
  }
  out.d_1C = dC;
  out.d_UC = dC;
  return out;
}

TerminalSpec terminal_positions(const ScenarioConfig& cfg, double t_f,
                                Branch b, const SpacingBounds& bounds) {
  if (!(t_f > 0.0)) throw std::invalid_argument("terminal_positions: t_f <= 0");
  const double eps = cfg.eps_margin;
  const Eigen::Vector3d ideal(cfg.state_1.x + cfg.state_1.v * t_f,
                              cfg.state_2.x + cfg.state_2.v * t_f,
                              cfg.state_C.x + cfg.state_C.v * t_f);
  // Rows g^T x <= h over x = (x_1f, x_2f, x_Cf).
  Eigen::Matrix<double, 6, 3> G;
  Eigen::Matrix<double, 6, 1> h;
  G << -1, 0, 1,  //
      0, 1, -1,   //
      0, 0, 1,    //
      -1, 0, 0,   //
      0, -1, 0,   //
      0, 0, -1;
  h << -bounds.d_1C - eps, -bounds.d_C2 - eps, cfg.x_U(t_f) - bounds.d_UC - eps,
      -cfg.state_1.x - eps, -cfg.state_2.x - eps, -cfg.state_C.x - eps;

  double best_cost = kInf;
  Eigen::Vector3d best = ideal;
  for (unsigned mask = 0; mask < 64; ++mask) {
    const int k = __builtin_popcount(mask);
    if (k > 3) continue;
    Eigen::Vector3d x = ideal;
    if (k > 0) {
      Eigen::MatrixXd A(k, 3);
      Eigen::VectorXd rhs(k);
      int r = 0;
      for (int i = 0; i < 6; ++i) {
        if (mask & (1u << i)) {
          A.row(r) = G.row(i);
          rhs(r) = h(i);
          ++r;
        }
      }
      const Eigen::MatrixXd AAt = A * A.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(AAt);
      if (lu.rank() < k) continue;
      x = ideal - A.transpose() * lu.solve(A * ideal - rhs);
    }
    const double tol = 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff());
    if (((G * x - h).array() > tol).any()) continue;
    const double cost = (x - ideal).squaredNorm();
    if (cost < best_cost - 1e-12) {
      best_cost = cost;
      best = x;
    }
  }
  if (!std::isfinite(best_cost)) {
    throw TerminalInfeasible("terminal spacing constraints are inconsistent");
  }
  TerminalSpec spec;
  spec.t_f = t_f;
  spec.x_1f = best(0);
  spec.x_2f = best(1);
  spec.x_Cf = best(2);
  spec.delta_x = {best(0) - ideal(0), best(1) - ideal(1), best(2) - ideal(2)};
  spec.branch = b;
  spec.bounds = bounds;
  return spec;
}

TerminalSpec terminal_positions(const ScenarioConfig& cfg, double t_f,
                                Branch b) {
  if (cfg.safety.d_C_fixed) {
    TerminalSpec spec =
        terminal_positions(cfg, t_f, b, resolve_spacing_bounds(cfg, t_f, b));
    spec.branch = implied_branch(cfg, t_f, spec.x_Cf);
    return spec;
  }
  const Branch other =
      b == Branch::kAccelerate ? Branch::kDecelerate : Branch::kAccelerate;
  for (Branch br : {b, other}) {
    try {
      TerminalSpec spec = terminal_positions(
          cfg, t_f, br, resolve_spacing_bounds(cfg, t_f, br));
      if (implied_branch(cfg, t_f, spec.x_Cf) == br) return spec;
    } catch (const TerminalInfeasible&) {
    }
  }
  const SpacingBounds ba = resolve_spacing_bounds(cfg, t_f, b);
  const SpacingBounds bo = resolve_spacing_bounds(cfg, t_f, other);
  const SpacingBounds wide{std::max(ba.d_1C, bo.d_1C),
                           std::max(ba.d_C2, bo.d_C2),
                           std::max(ba.d_UC, bo.d_UC)};
  TerminalSpec spec = terminal_positions(cfg, t_f, b, wide);
  spec.branch = implied_branch(cfg, t_f, spec.x_Cf);
  return spec;
}

TerminalSpec fixed_terminal_spec(const ScenarioConfig& cfg, double t_f,
                                 double x_1f, double x_2f, double x_Cf) {
  if (!(t_f > 0.0)) throw std::invalid_argument("fixed_terminal_spec: t_f <= 0");
  TerminalSpec spec;
  spec.t_f = t_f;
  spec.x_1f = x_1f;
  spec.x_2f = x_2f;
  spec.x_Cf = x_Cf;
  spec.delta_x = {x_1f - cfg.state_1.x - cfg.state_1.v * t_f,
                  x_2f - cfg.state_2.x - cfg.state_2.v * t_f,
                  x_Cf - cfg.state_C.x - cfg.state_C.v * t_f};
  spec.branch = implied_branch(cfg, t_f, x_Cf);
  spec.bounds = resolve_spacing_bounds(cfg, t_f, spec.branch);
  return spec;
}

}  // namespace lanechange
