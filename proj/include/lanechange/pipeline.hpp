#pragma once

#include <array>
#include <optional>
#include <string>

#include "lanechange/audit.hpp"
#include "lanechange/feasibility.hpp"
#include "lanechange/terminal.hpp"
#include "lanechange/vehicle_c.hpp"

namespace lanechange {

struct PlanOverrides {
  std::optional<double> t_f;
  // Fixed {x_1f, x_2f, x_Cf}; requires t_f.
  std::optional<std::array<double, 3>> terminal;
};

struct PlanOptions {
  int n_samples = 1000;
  int oracle_n = 500;
  bool run_oracle = true;
  double tolerance = 0.01;
};

struct VehicleSummary {
  std::string name;
  std::string case_id;
  std::optional<double> t1;
  std::optional<double> tau;
  double energy_half = 0.0;  // 1/2 int u^2
  double energy_full = 0.0;  // int u^2
  std::optional<double> oracle_energy;
  std::optional<double> oracle_delta;
  std::string oracle_error;
};

struct PlanReport {
  ManeuverPlan plan;
  std::optional<TerminalTime> timing;
  int relax_iterations = 0;
  CaseClassification classification;
  std::optional<ConstrainedArcSolution> constrained;
  std::array<VehicleSummary, 3> vehicles;  // {1, 2, C}
  double w_t = 0.0;
  double weighted_cost = 0.0;
  bool oracle_checked = false;
  bool oracle_ok = false;
  bool verdict_ok = false;
  std::string advice;

  double total_energy_half() const;
  double total_energy_full() const;
};

/// Runs terminal time, terminal positions, relaxation, the three vehicle
/// solvers, the audit and the oracle cross-check.
///
/// Throws ManeuverAborted, RelaxationFailed, TerminalInfeasible,
/// OcpInfeasible or ConstrainedInfeasible when no plan exists, and
/// InvalidScenario for malformed input.
PlanReport plan_maneuver(const ScenarioConfig& cfg,
                         const PlanOverrides& overrides = {},
                         const PlanOptions& opts = {});

// Relative oracle gap |J_a - J_o| / max(J_o, 1e-9).
double oracle_delta(double analytic, double oracle);

}  // namespace lanechange
