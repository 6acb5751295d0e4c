#pragma once

#include <optional>
#include <string>
#include <variant>

#include "lanechange/analytic_ocp.hpp"
#include "lanechange/terminal.hpp"

namespace lanechange {

enum class CaseLabel { kCase1, kCase2, kCase3, kInfeasible };

std::string to_string(CaseLabel c);

struct CaseClassification {
  double xbar_Cf = 0.0;
  double u_bound = 0.0;
  double x_Cf = 0.0;
  CaseLabel label = CaseLabel::kInfeasible;
};

CaseClassification classify_case(const ScenarioConfig& cfg,
                                 const TerminalSpec& spec);

enum class Subcase { kA, kB, kInterior };

std::string to_string(Subcase s);

struct ConstrainedArcSolution {
  double tau1 = 0.0;
  double a = 0.0;
  // Switch between the saturated and affine pieces of subproblem 1.
  std::optional<double> tau2;
  Subcase subcase = Subcase::kInterior;
  double J1 = 0.0;
  double J2 = 0.0;
  OcpCase tail_case = OcpCase::kIV;
  Trajectory traj;
  // Central-difference dJ/dtau1 at the returned tau1.
  double stationarity = 0.0;

  double cost() const { return J1 + J2; }
};

// Cost of the constrained decomposition for a fixed entry time; nullopt when
// either subproblem has no admissible solution.
std::optional<ConstrainedArcSolution> constrained_at(const ScenarioConfig& cfg,
                                                     const TerminalSpec& spec,
                                                     double tau1);

// Throws ConstrainedInfeasible.
ConstrainedArcSolution solve_constrained(const ScenarioConfig& cfg,
                                         const TerminalSpec& spec);

enum class PlanLabel {
  kCase1,
  kCase2,
  kCase3Unconstrained,
  kCase3Constrained,
};

std::string to_string(PlanLabel l);

struct CPlan {
  PlanLabel label = PlanLabel::kCase1;
  std::variant<OcpSolution, ConstrainedArcSolution> solution;

  const Trajectory& traj() const;
  double cost() const;
};

// Minimum over [t0, tf] of x_U(t) - x_C(t) - d_C, sampled on n points plus
// every arc boundary.
double min_U_slack(const ScenarioConfig& cfg, const Trajectory& traj,
                   double d_C, int n_samples = 1000);

// Throws ManeuverAborted for an Infeasible classification; propagates
// OcpInfeasible and ConstrainedInfeasible.
CPlan plan_C(const ScenarioConfig& cfg, const TerminalSpec& spec);

}  // namespace lanechange
