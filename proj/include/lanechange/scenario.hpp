#pragma once

#include <string>
#include <vector>

#include "lanechange/core.hpp"

namespace lanechange {

struct ScenarioConfig {
  VehicleState state_1;
  VehicleState state_2;
  VehicleState state_C;
  VehicleState state_U;  // state_U.v is the constant speed v_U

  VehicleLimits limits_1;
  VehicleLimits limits_2;
  VehicleLimits limits_C;

  double alpha_1 = 0.5;
  double alpha_2 = 0.5;
  double alpha_C = 0.5;

  double rho = 0.5;
  double T_max = 100.0;
  double beta0 = 1.1;
  SafetyModel safety;
  double eps_margin = 1e-6;
  // Lower floor on the maneuver horizon.
  double min_horizon = 1.0;

  double v_U() const { return state_U.v; }
  double x_U(double t) const { return state_U.x + state_U.v * t; }

  // Structural checks. Throws InvalidScenario.
  void validate() const;

  // Initial-ordering conditions that do not hold; empty when all hold.
  std::vector<std::string> initial_ordering_issues() const;
};

}  // namespace lanechange
