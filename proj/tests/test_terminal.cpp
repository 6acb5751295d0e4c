#include <gtest/gtest.h>

#include <cmath>

#include "lanechange/errors.hpp"
#include "lanechange/reference.hpp"
#include "lanechange/terminal.hpp"
#include "support.hpp"

namespace lc = lanechange;
using lc::testing::Rng;
using lc::testing::uniform;

namespace {

lc::ScenarioConfig cruise() {
  lc::ScenarioConfig cfg = lc::reference_base();
  cfg.state_1 = {200, 20};
  cfg.state_2 = {0, 20};
  cfg.state_C = {100, 20};
  cfg.state_U = {300, 20};
  return cfg;
}

bool qp_feasible(const lc::ScenarioConfig& cfg, const lc::TerminalSpec& s,
                 double x1, double x2, double xC) {
  const auto& b = s.bounds;
  const double e = cfg.eps_margin - 1e-9;
  return x1 - xC >= b.d_1C + e && xC - x2 >= b.d_C2 + e &&
         cfg.x_U(s.t_f) - xC >= b.d_UC + e && x1 > cfg.state_1.x &&
         x2 > cfg.state_2.x && xC > cfg.state_C.x;
}

}  // namespace

TEST(TerminalPositions, ReproducesPublishedPositionsUnderItsSpacingBounds) {
  const auto cfg = lc::maneuver_cases()[0].cfg;
  const lc::SpacingBounds b{50.02, 30.0, 50.02};
  const auto s = lc::terminal_positions(cfg, 28.14, lc::Branch::kAccelerate, b);
  EXPECT_NEAR(s.x_1f, 455.82, 1e-6);
  EXPECT_NEAR(s.x_Cf, 303.24, 1e-5);
  EXPECT_NEAR(s.x_2f, 273.24, 1e-5);
}

TEST(TerminalPositions, IdealEndpointsNeedNoDeviation) {
  const auto cfg = cruise();
  const auto s = lc::terminal_positions(cfg, 1.0, lc::Branch::kAccelerate);
  EXPECT_DOUBLE_EQ(s.cost(), 0.0);
  EXPECT_DOUBLE_EQ(s.x_1f, 220.0);
  EXPECT_DOUBLE_EQ(s.x_2f, 20.0);
  EXPECT_DOUBLE_EQ(s.x_Cf, 120.0);
}

TEST(TerminalPositions, UTooCloseIsInfeasible) {
  auto cfg = cruise();
  cfg.state_U = {105, 1};
  cfg.safety.d_C_fixed = 30.0;
  EXPECT_THROW(lc::terminal_positions(cfg, 1.0, lc::Branch::kDecelerate),
               lc::TerminalInfeasible);
}

TEST(TerminalPositions, NonPositiveHorizonRejected) {
  EXPECT_THROW(lc::terminal_positions(cruise(), 0.0, lc::Branch::kAccelerate),
               std::invalid_argument);
}

TEST(TerminalPositions, KeepsLeaderAheadAndFollowerBehind) {
  Rng rng(101);
  int solved = 0;
  for (int i = 0; i < 500; ++i) {
    const auto cfg = lc::testing::random_scenario(rng);
    const double tf = uniform(rng, 1, 40);
    try {
      const auto s = lc::terminal_positions(cfg, tf, lc::Branch::kAccelerate);
      EXPECT_GE(s.delta_x[0], -1e-9);
      EXPECT_LE(s.delta_x[1], 1e-9);
      EXPECT_TRUE(qp_feasible(cfg, s, s.x_1f, s.x_2f, s.x_Cf));
      ++solved;
    } catch (const lc::TerminalInfeasible&) {
    }
  }
  EXPECT_GT(solved, 250);
}

TEST(TerminalPositions, GridSearchNeverBeatsQp) {
  Rng rng(202);
  constexpr double h = 0.1;
  constexpr int r = 30;
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto cfg = lc::testing::random_scenario(rng);
    const double tf = uniform(rng, 2, 20);
    lc::TerminalSpec s;
    try {
      s = lc::terminal_positions(cfg, tf, lc::Branch::kAccelerate);
    } catch (const lc::TerminalInfeasible&) {
      continue;
    }
    const double i1 = cfg.state_1.x + cfg.state_1.v * tf;
    const double i2 = cfg.state_2.x + cfg.state_2.v * tf;
    const double iC = cfg.state_C.x + cfg.state_C.v * tf;
    const double c1 = std::round(s.x_1f / h) * h;
    const double c2 = std::round(s.x_2f / h) * h;
    const double cC = std::round(s.x_Cf / h) * h;
    double best = INFINITY;
    for (int a = -r; a <= r; ++a) {
      for (int b = -r; b <= r; ++b) {
        for (int c = -r; c <= r; ++c) {
          const double x1 = c1 + a * h, x2 = c2 + b * h, xC = cC + c * h;
          if (!qp_feasible(cfg, s, x1, x2, xC)) continue;
          const double cost = (x1 - i1) * (x1 - i1) + (x2 - i2) * (x2 - i2) +
                              (xC - iC) * (xC - iC);
          best = std::min(best, cost);
        }
      }
    }
    ASSERT_TRUE(std::isfinite(best));
    const double norm = std::sqrt(s.cost());
    EXPECT_GE(best, s.cost() - 1e-6 * std::max(1.0, s.cost()));
    EXPECT_LE(best, s.cost() + 2 * std::sqrt(3.0) * h * norm + 3 * h * h);
    ++checked;
  }
  EXPECT_GE(checked, 6);
}

TEST(MinTerminalTime, CruiseScenarioUsesHorizonFloor) {
  const auto t = lc::min_terminal_time(cruise());
  EXPECT_DOUBLE_EQ(t.t_f, 1.0);
  EXPECT_TRUE(t.floored);
}

TEST(MinTerminalTime, ResultSatisfiesBranchAndIsMinimal) {
  Rng rng(303);
  int checked = 0;
  auto cases = lc::maneuver_cases();
  for (int i = 0; i < 300; ++i) {
    const auto cfg = i < 3 ? cases[i].cfg : lc::testing::random_scenario(rng);
    lc::TerminalTime t;
    try {
      t = lc::min_terminal_time(cfg);
    } catch (const lc::ManeuverAborted&) {
      continue;
    }
    auto c = cfg;
    c.alpha_1 = t.alpha[0];
    c.alpha_2 = t.alpha[1];
    c.alpha_C = t.alpha[2];
    EXPECT_GE(lc::branch_slack(c, t.branch, t.t_f), 0.0);
    if (!t.floored) {
      EXPECT_LT(lc::branch_slack(c, t.branch, t.t_f - 0.01), 0.0)
          << "t_f=" << t.t_f;
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(MinTerminalTime, AggressivenessOfGapVehiclesNeverDelays) {
  Rng rng(404);
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    const auto cfg = lc::testing::random_scenario(rng);
    auto hot = cfg;
    (i % 2 == 0 ? hot.alpha_1 : hot.alpha_2) += 0.3;
    for (auto b : {lc::Branch::kAccelerate, lc::Branch::kDecelerate}) {
      const auto base = lc::branch_min_time(cfg, b);
      const auto faster = lc::branch_min_time(hot, b);
      if (base) {
        ASSERT_TRUE(faster.has_value());
        EXPECT_LE(*faster, *base + 1e-9);
      }
    }
    try {
      const auto base = lc::min_terminal_time(cfg);
      const auto faster = lc::min_terminal_time(hot);
      // The alpha iteration raises every alpha, so compare only
      // non-iterated runs.
      if (base.alpha_rounds == 0 && faster.alpha_rounds == 0) {
        EXPECT_LE(faster.t_f, base.t_f + 1e-9);
        ++compared;
      }
    } catch (const lc::ManeuverAborted&) {
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(MinTerminalTime, AbortsWhenNoHorizonFits) {
  auto cfg = cruise();
  cfg.state_1 = {110, 1};
  cfg.limits_1.v_max = 1.5;
  cfg.state_2 = {95, 30};
  cfg.limits_2.v_min = 29.0;
  cfg.T_max = 10.0;
  EXPECT_THROW(lc::min_terminal_time(cfg), lc::ManeuverAborted);
}

TEST(SpacingBounds, FixedDistanceOverridesSpeedRule) {
  auto cfg = lc::maneuver_cases()[0].cfg;
  const auto acc = lc::resolve_spacing_bounds(cfg, 2.0, lc::Branch::kAccelerate);
  EXPECT_DOUBLE_EQ(acc.d_1C, lc::safe_distance(10 + 3.3 * 2, cfg.safety));
  EXPECT_DOUBLE_EQ(acc.d_C2, lc::safe_distance(18, cfg.safety));
  const auto dec = lc::resolve_spacing_bounds(cfg, 2.0, lc::Branch::kDecelerate);
  EXPECT_DOUBLE_EQ(dec.d_UC, lc::safe_distance(10, cfg.safety));
  cfg.safety.d_C_fixed = 30.0;
  const auto fixed = lc::resolve_spacing_bounds(cfg, 2.0, lc::Branch::kAccelerate);
  EXPECT_DOUBLE_EQ(fixed.d_1C, 30.0);
  EXPECT_DOUBLE_EQ(fixed.d_UC, 30.0);
}
