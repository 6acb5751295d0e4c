#include "lanechange/reference.hpp"

namespace lanechange {

namespace {

ScenarioConfig with_states(double x1, double v1, double x2, double v2,
                           double xC, double vC, double xU, double vU) {
  ScenarioConfig c = reference_base();
  c.state_1 = {x1, v1};
  c.state_2 = {x2, v2};
  c.state_C = {xC, vC};
  c.state_U = {xU, vU};
  return c;
}

}  // namespace

ScenarioConfig reference_base() {
  ScenarioConfig c;
  const VehicleLimits lim{-7.0, 3.3, 1.0, 33.0};
  c.limits_1 = lim;
  c.limits_2 = lim;
  c.limits_C = lim;
  c.alpha_1 = c.alpha_2 = c.alpha_C = 0.5;
  return c;
}

std::vector<ReferenceScenario> maneuver_cases() {
  std::vector<ReferenceScenario> out;
  {
    ReferenceScenario r{"case-1", with_states(90, 13, 50, 18, 13, 10, 100, 9), {}};
    r.published.t_f = 28.14;
    r.published.x_1f = 455.8;
    r.published.x_2f = 273.24;
    r.published.x_Cf = 303.24;
    r.published.expected_case = "Case1";
    out.push_back(r);
  }
  {
    ReferenceScenario r{"case-2", with_states(70, 13, 30, 18, 13, 12, 80, 10), {}};
    r.published.t_f = 21.4;
    r.published.x_1f = 348.37;
    r.published.x_2f = 214.13;
    r.published.x_Cf = 244.13;
    r.published.expected_case = "Case2";
    out.push_back(r);
  }
  {
    ReferenceScenario r{"case-3", with_states(40, 11, 10, 23, 13, 19, 40, 8), {}};
    r.published.t_f = 14.49;
    r.published.x_1f = 199.37;
    r.published.x_2f = 75.0;
    r.published.x_Cf = 105.9;
    r.published.tau1 = 3.2;
    r.published.a = 43.0;
    r.published.expected_case = "Case3-constrained";
    out.push_back(r);
  }
  return out;
}

std::vector<ReferenceScenario> energy_cases() {
  std::vector<ReferenceScenario> out;
  auto add = [&](const std::string& name, ScenarioConfig c, double cav,
                 double human) {
    c.safety.d_C_fixed = 30.0;
    ReferenceScenario r{name, c, {}};
    r.published.cav_energy = cav;
    r.published.human_energy = human;
    out.push_back(r);
  };
  add("energy-1", with_states(95, 13, 0, 18, 13, 10, 120, 9), 6.8, 16.4);
  add("energy-2", with_states(120, 13, 30, 18, 13, 16, 100, 10), 23.0, 46.0);
  add("energy-3", with_states(100, 11, 10, 23, 213, 19, 290, 8), 59.5, 103.5);
  return out;
}

}  // namespace lanechange
