#pragma once

#include <array>
#include <optional>
#include <string>

#include "lanechange/scenario.hpp"

namespace lanechange {

enum class Branch { kAccelerate, kDecelerate };

std::string to_string(Branch b);

// Right-hand sides of the three terminal spacing constraints.
struct SpacingBounds {
  double d_1C = 0.0;  // x_1f - x_Cf
  double d_C2 = 0.0;  // x_Cf - x_2f
  double d_UC = 0.0;  // x_U(t_f) - x_Cf
};

struct TerminalSpec {
  double t_f = 0.0;
  double x_1f = 0.0;
  double x_2f = 0.0;
  double x_Cf = 0.0;
  // Deviation from the constant-speed endpoint, ordered {1, 2, C}.
  std::array<double, 3> delta_x{};
  Branch branch = Branch::kAccelerate;
  SpacingBounds bounds;

  double cost() const;
};

struct TerminalTime {
  double t_f = 0.0;
  Branch branch = Branch::kAccelerate;
  // Aggressiveness actually used, ordered {1, 2, C}.
  std::array<double, 3> alpha{};
  int alpha_rounds = 0;
  // True when the spacing conditions already hold as t_f -> 0 and the
  // horizon floor decided t_f.
  bool floored = false;
};

// Smallest t in [min_horizon, T_max] satisfying one branch at fixed alphas.
std::optional<double> branch_min_time(const ScenarioConfig& cfg, Branch b);

// Throws ManeuverAborted when neither branch admits a horizon after the
// alpha iteration.
TerminalTime min_terminal_time(const ScenarioConfig& cfg);

// Slack of the branch constraints at time t (minimum over the branch's
// constraints, already net of eps_margin).
double branch_slack(const ScenarioConfig& cfg, Branch b, double t);

SpacingBounds resolve_spacing_bounds(const ScenarioConfig& cfg, double t_f,
                                     Branch b);

// Throws TerminalInfeasible.
TerminalSpec terminal_positions(const ScenarioConfig& cfg, double t_f,
                                Branch b, const SpacingBounds& bounds);
// Resolves bounds from the branch, then re-solves once if vehicle C ends up
// moving the other way.
TerminalSpec terminal_positions(const ScenarioConfig& cfg, double t_f,
                                Branch b);

// Builds a spec from fixed terminal positions, resolving bounds from the
// direction vehicle C has to move.
TerminalSpec fixed_terminal_spec(const ScenarioConfig& cfg, double t_f,
                                 double x_1f, double x_2f, double x_Cf);

}  // namespace lanechange
