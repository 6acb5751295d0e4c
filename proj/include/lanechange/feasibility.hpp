#pragma once

#include <optional>
#include <string>

#include "lanechange/terminal.hpp"

namespace lanechange {

enum class Violation {
  kCannotReachI,
  kCannotReachII,
  kOvershootIII,
  kOvershootIV,
  kUSafetyBound,
};

std::string to_string(Violation v);

struct FeasibilityVerdict {
  bool feasible = true;
  std::optional<Violation> violation;

  static FeasibilityVerdict ok() { return {}; }
  static FeasibilityVerdict fail(Violation v) { return {false, v}; }
};

/// Reachable terminal-position interval [lo, hi] at time t_f under the box.
struct ReachEnvelope {
  double lo = 0.0;
  double hi = 0.0;
};

ReachEnvelope reach_envelope(const VehicleState& s, const VehicleLimits& lim,
                             double t_f);

FeasibilityVerdict classify(const VehicleState& state_0,
                            const VehicleLimits& limits, double x_f,
                            double t_f);

FeasibilityVerdict check_C_safety_bound(const ScenarioConfig& cfg,
                                        double x_Cf, double t_f,
                                        double d_C);
FeasibilityVerdict check_C_safety_bound(const ScenarioConfig& cfg,
                                        const TerminalSpec& spec);

// First violation over vehicles 1, 2, C and the U bound.
FeasibilityVerdict check_spec(const ScenarioConfig& cfg,
                              const TerminalSpec& spec);

struct RelaxResult {
  TerminalSpec spec;
  int iterations = 0;
};

struct RelaxOptions {
  int max_iterations = 20;
};

// Multiplies t by beta_k = beta0^k on retry k = 1, 2, ... and re-solves the terminal
// positions until the spec is feasible. Throws RelaxationFailed.
RelaxResult relax_from_time(const ScenarioConfig& cfg, double t_0, Branch b,
                            const RelaxOptions& opts = {});

// Throws RelaxationFailed.
RelaxResult relax_until_feasible(const ScenarioConfig& cfg,
                                 const TerminalSpec& spec,
                                 const RelaxOptions& opts = {});

}  // namespace lanechange
