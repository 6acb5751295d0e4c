#pragma once

#include <optional>
#include <string>

#include "lanechange/core.hpp"

namespace lanechange {

enum class ControlSign { kNonneg, kNonpos };

struct OcpProblem {
  VehicleState state_0;
  VehicleLimits limits;
  double t_0 = 0.0;
  double t_f = 0.0;
  double x_f = 0.0;
  ControlSign sign = ControlSign::kNonneg;
};

enum class OcpCase { kI, kII, kIII, kIV, kV };

std::string to_string(OcpCase c);

struct OcpSolution {
  Trajectory traj;
  double cost = 0.0;
  OcpCase case_id = OcpCase::kV;
  // Control-saturation exit t1 and speed-saturation entry tau (absolute).
  std::optional<double> t1;
  std::optional<double> tau;
};

// Minimum of 1/2 int u^2 with 0 <= u <= u_max, v <= v_max, x(t_f) = x_f.
// Throws OcpInfeasible; std::invalid_argument on a malformed problem.
OcpSolution solve_advance(const OcpProblem& p);

// Mirror image with u_min <= u <= 0, v >= v_min.
OcpSolution solve_retard(const OcpProblem& p);

// Dispatches on p.sign.
OcpSolution solve_ocp(const OcpProblem& p);

// 3/2 E^2 / T^3 with E = x_f - x_0 - v_0 T.
double interior_cost(const OcpProblem& p);

}  // namespace lanechange
