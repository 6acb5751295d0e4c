#include "lanechange/scenario.hpp"

#include <cmath>

#include "lanechange/errors.hpp"

namespace lanechange {

namespace {

void require_state(const VehicleState& s, const std::string& who) {
  if (!std::isfinite(s.x) || !std::isfinite(s.v)) {
    throw InvalidScenario(who + ": state must be finite");
  }
  if (s.v < 0.0) throw InvalidScenario(who + ": negative speed");
}

void require_in_speed_box(const VehicleState& s, const VehicleLimits& l,
                          const std::string& who) {
  if (s.v < l.v_min || s.v > l.v_max) {
    throw InvalidScenario(who + ": initial speed outside [v_min, v_max]");
  }
}

void require_alpha(double a, const std::string& who) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw InvalidScenario(who + ": alpha must lie in [0, 1)");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  require_state(state_1, "vehicle 1");
  require_state(state_2, "vehicle 2");
  require_state(state_C, "vehicle C");
  require_state(state_U, "vehicle U");
  limits_1.validate("vehicle 1");
  limits_2.validate("vehicle 2");
  limits_C.validate("vehicle C");
  require_in_speed_box(state_1, limits_1, "vehicle 1");
  require_in_speed_box(state_2, limits_2, "vehicle 2");
  require_in_speed_box(state_C, limits_C, "vehicle C");
  require_alpha(alpha_1, "vehicle 1");
  require_alpha(alpha_2, "vehicle 2");
  require_alpha(alpha_C, "vehicle C");
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidScenario("rho outside [0, 1]");
  if (!(T_max > 0.0) || !std::isfinite(T_max)) {
    throw InvalidScenario("T_max must be positive");
  }
  if (!(beta0 > 1.0) || !std::isfinite(beta0)) {
    throw InvalidScenario("beta0 must exceed 1");
  }
  if (!(safety.phi >= 0.0) || !(safety.delta >= 0.0)) {
    throw InvalidScenario("safety: phi and delta must be non-negative");
  }
  if (safety.d_C_fixed && !(*safety.d_C_fixed >= 0.0)) {
    throw InvalidScenario("safety: d_C_fixed must be non-negative");
  }
  if (!(eps_margin >= 0.0)) throw InvalidScenario("eps_margin is negative");
  if (!(min_horizon > 0.0) || min_horizon > T_max) {
    throw InvalidScenario("min_horizon must lie in (0, T_max]");
  }
}

std::vector<std::string> ScenarioConfig::initial_ordering_issues() const {
  std::vector<std::string> issues;
  const double d2 = safe_distance(state_2.v, safety);
  if (!(state_1.x - state_2.x > d2)) {
    issues.push_back("x_1(0) - x_2(0) does not exceed d(v_2(0))");
  }
  const double dC = safety.d_C_fixed ? *safety.d_C_fixed
                                     : safe_distance(state_C.v, safety);
  if (!(state_U.x - state_C.x > dC)) {
    issues.push_back("x_U(0) - x_C(0) does not exceed d_C");
  }
  return issues;
}

}  // namespace lanechange
