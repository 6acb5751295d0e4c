#include "lanechange/audit.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lanechange {

namespace {

class SlackTracker {
 public:
  void add(const std::string& name, double slack, double t) {
    for (auto& e : entries_) {
      if (e.name == name) {
        if (slack < e.min_slack) {
          e.min_slack = slack;
          e.at_time = t;
        }
        return;
      }
    }
    entries_.push_back({name, slack, t});
  }
  std::vector<SlackEntry> take() { return std::move(entries_); }

 private:
  std::vector<SlackEntry> entries_;
};

double box_slack(double value, double lo, double hi) {
  return std::min(value - lo, hi - value);
}

}  // namespace

const SlackEntry& SafetyAudit::get(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("no audit entry named " + name);
}

std::vector<SampleRow> sample_plan(const Trajectory& t1, const Trajectory& t2,
                                   const Trajectory& tC,
                                   const std::vector<double>& times) {
  std::vector<SampleRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    rows.push_back({t, t1.evaluate(t), t1.control(t), t2.evaluate(t),
                    t2.control(t), tC.evaluate(t), tC.control(t)});
  }
  return rows;
}

std::vector<double> audit_times(const ManeuverPlan& plan, int n_samples) {
  const double tf = plan.terminal.t_f;
  const int n = std::max(n_samples, 2);
  std::vector<double> times;
  times.reserve(n + 16);
  for (int i = 0; i < n; ++i) times.push_back(tf * i / (n - 1));
  for (const Trajectory* tr : {&plan.traj_1, &plan.traj_2, &plan.traj_C}) {
    for (const auto& a : tr->arcs()) times.push_back(a.t_start);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  times.back() = tf;
  return times;
}

SafetyAudit audit_rows(const std::vector<SampleRow>& rows,
                       const ScenarioConfig& cfg, double d_C) {
  SlackTracker tr;
  for (const auto& r : rows) {
    const double d2 = safe_distance(std::max(r.s2.v, 0.0), cfg.safety);
    tr.add("spacing_12", r.s1.x - r.s2.x - d2, r.t);
    tr.add("spacing_UC", cfg.x_U(r.t) - r.sC.x - d_C, r.t);
    tr.add("u_1", box_slack(r.u1, cfg.limits_1.u_min, cfg.limits_1.u_max), r.t);
    tr.add("u_2", box_slack(r.u2, cfg.limits_2.u_min, cfg.limits_2.u_max), r.t);
    tr.add("u_C", box_slack(r.uC, cfg.limits_C.u_min, cfg.limits_C.u_max), r.t);
    tr.add("v_1", box_slack(r.s1.v, cfg.limits_1.v_min, cfg.limits_1.v_max), r.t);
    tr.add("v_2", box_slack(r.s2.v, cfg.limits_2.v_min, cfg.limits_2.v_max), r.t);
    tr.add("v_C", box_slack(r.sC.v, cfg.limits_C.v_min, cfg.limits_C.v_max), r.t);
  }
  if (!rows.empty()) {
    const auto& r = rows.back();
    const double d2 = safe_distance(std::max(r.s2.v, 0.0), cfg.safety);
    tr.add("terminal_1C", r.s1.x - r.sC.x - d_C, r.t);
    tr.add("terminal_C2", r.sC.x - r.s2.x - d2, r.t);
  }
  SafetyAudit audit;
  audit.entries = tr.take();
  for (const auto& e : audit.entries) {
    if (!(e.min_slack > -cfg.eps_margin)) audit.pass = false;
  }
  return audit;
}

SafetyAudit audit_safety(const ManeuverPlan& plan, const ScenarioConfig& cfg,
                         int n_samples) {
  const auto rows = sample_plan(plan.traj_1, plan.traj_2, plan.traj_C,
                                audit_times(plan, n_samples));
  return audit_rows(rows, cfg, plan.terminal.bounds.d_UC);
}

}  // namespace lanechange
