#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lanechange/scenario.hpp"

namespace lanechange {

// Published outcome for one reference scenario; unset fields are not stated.
struct PublishedValues {
  std::optional<double> t_f;
  std::optional<double> x_1f;
  std::optional<double> x_2f;
  std::optional<double> x_Cf;
  std::optional<double> tau1;
  std::optional<double> a;
  std::optional<double> cav_energy;
  std::optional<double> human_energy;
  std::string expected_case;
};

struct ReferenceScenario {
  std::string name;
  ScenarioConfig cfg;
  PublishedValues published;
};

// Common limits and aggressiveness of the reference runs.
ScenarioConfig reference_base();

// Three maneuver cases with reported horizons and terminal positions.
std::vector<ReferenceScenario> maneuver_cases();

// Three energy-comparison scenarios with d_C fixed at 30 m.
std::vector<ReferenceScenario> energy_cases();

}  // namespace lanechange
