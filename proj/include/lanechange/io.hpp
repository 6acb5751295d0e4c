#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanechange/audit.hpp"
#include "lanechange/pipeline.hpp"
#include "lanechange/scenario.hpp"

namespace lanechange {

inline constexpr int kSchemaVersion = 1;

struct ScenarioFile {
  int schema_version = kSchemaVersion;
  ScenarioConfig cfg;
  PlanOverrides overrides;
};

// Throws InvalidScenario on unknown or missing fields.
ScenarioFile parse_scenario(const nlohmann::json& j);
ScenarioFile load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const ScenarioFile& f);

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols{
      "t",   "x_1", "v_1", "u_1", "x_2", "v_2",     "u_2",
      "x_C", "v_C", "u_C", "x_U", "slack_U", "slack_12"};
  return cols;
}

// Uniform grid at step dt on [0, t_f], with t_f always included.
std::vector<double> table_times(double t_f, double dt);

void write_trajectory_csv(std::ostream& os, const ManeuverPlan& plan,
                          const ScenarioConfig& cfg, double dt);

// Throws InvalidScenario on a header or row that does not match the schema.
std::vector<SampleRow> read_trajectory_csv(std::istream& is);

// d_C applicable to an externally produced table, from its final row.
double table_d_C(const ScenarioConfig& cfg, const std::vector<SampleRow>& rows);

nlohmann::json audit_to_json(const SafetyAudit& a);
nlohmann::json report_to_json(const PlanReport& r);
std::string report_summary(const PlanReport& r);

}  // namespace lanechange
