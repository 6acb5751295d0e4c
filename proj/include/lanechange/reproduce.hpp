#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanechange/pipeline.hpp"
#include "lanechange/reference.hpp"

namespace lanechange {

struct ReproCheck {
  std::string quantity;
  std::optional<double> computed;
  std::optional<double> expected;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
  // Reported only; always counts as passing.
  bool info = false;
};

struct ReproRun {
  std::string scenario;
  // Diagnostic runs are reported but never decide the outcome.
  bool diagnostic = false;
  std::string setup;
  std::vector<ReproCheck> checks;
  std::optional<PlanReport> report;
  std::string error;
  double runtime_s = 0.0;

  bool pass() const;
};

struct ReproSummary {
  std::vector<ReproRun> runs;

  // True when every non-diagnostic check passes.
  bool pass() const;
  const ReproRun& get(const std::string& scenario) const;
};

// Reference maneuver run with the default pipeline; checks horizon,
// terminal positions and the case-specific shape of the plan.
ReproRun reproduce_maneuver(const ReferenceScenario& r, const PlanOptions& opts);

// Energy run; passes when either cost convention is within 10%.
ReproRun reproduce_energy(const ReferenceScenario& r, const PlanOptions& opts);

// Re-plans with the published horizon, and for constrained cases also with
// the published terminal positions.
std::vector<ReproRun> reproduce_diagnostics(const ReferenceScenario& r,
                                            const PlanOptions& opts);

ReproSummary reproduce_paper(const PlanOptions& opts = {});

std::string format_table(const ReproSummary& s);
nlohmann::json summary_to_json(const ReproSummary& s);

}  // namespace lanechange
