#pragma once

#include <string>
#include <vector>

#include "lanechange/core.hpp"
#include "lanechange/scenario.hpp"
#include "lanechange/terminal.hpp"
#include "lanechange/vehicle_c.hpp"

namespace lanechange {

struct SlackEntry {
  std::string name;
  double min_slack = 0.0;
  double at_time = 0.0;
};

struct SafetyAudit {
  bool pass = true;
  std::vector<SlackEntry> entries;

  // Throws std::out_of_range for an unknown name.
  const SlackEntry& get(const std::string& name) const;
};

struct ManeuverPlan {
  TerminalSpec terminal;
  Trajectory traj_1;
  Trajectory traj_2;
  Trajectory traj_C;
  double energy_1 = 0.0;
  double energy_2 = 0.0;
  double energy_C = 0.0;
  PlanLabel case_label = PlanLabel::kCase1;
  SafetyAudit audit;
};

/// Sampled snapshot of the three controlled vehicles.
struct SampleRow {
  double t = 0.0;
  VehicleState s1;
  double u1 = 0.0;
  VehicleState s2;
  double u2 = 0.0;
  VehicleState sC;
  double uC = 0.0;
};

std::vector<SampleRow> sample_plan(const Trajectory& t1, const Trajectory& t2,
                                   const Trajectory& tC,
                                   const std::vector<double>& times);

// Uniform grid on [0, t_f] merged with every arc boundary.
std::vector<double> audit_times(const ManeuverPlan& plan, int n_samples);

// Checks spacing, U-safety and box constraints on every row, and the
// terminal spacing on the last row.
SafetyAudit audit_rows(const std::vector<SampleRow>& rows,
                       const ScenarioConfig& cfg, double d_C);

SafetyAudit audit_safety(const ManeuverPlan& plan, const ScenarioConfig& cfg,
                         int n_samples = 1000);

}  // namespace lanechange
