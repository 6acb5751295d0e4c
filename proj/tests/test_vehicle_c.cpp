#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "lanechange/errors.hpp"
#include "lanechange/oracle.hpp"
#include "lanechange/pipeline.hpp"
#include "lanechange/reference.hpp"
#include "lanechange/vehicle_c.hpp"
#include "support.hpp"

namespace lc = lanechange;
using lc::testing::Rng;
using lc::testing::uniform;

namespace {

struct Fixed {
  lc::ScenarioConfig cfg;
  lc::TerminalSpec spec;
};

Fixed third_case(double d_C) {
  Fixed f{lc::maneuver_cases()[2].cfg, {}};
  f.cfg.safety.d_C_fixed = d_C;
  f.spec = lc::fixed_terminal_spec(f.cfg, 14.49, 199.39, 75.0, 105.9);
  return f;
}

}  // namespace

TEST(ClassifyCase, FirstReferenceCaseIsCaseOne) {
  auto cfg = lc::maneuver_cases()[0].cfg;
  cfg.safety.d_C_fixed = 30.0;
  const auto spec = lc::fixed_terminal_spec(cfg, 28.14, 455.8, 273.24, 303.24);
  const auto c = lc::classify_case(cfg, spec);
  EXPECT_NEAR(c.xbar_Cf, 294.4, 1e-9);
  EXPECT_NEAR(c.u_bound, 323.26, 1e-9);
  EXPECT_EQ(c.label, lc::CaseLabel::kCase1);
}

TEST(ClassifyCase, SecondReferenceTerminalFallsUnderTheBound) {
  auto cfg = lc::maneuver_cases()[1].cfg;
  cfg.safety.d_C_fixed = 30.0;
  const auto spec = lc::fixed_terminal_spec(cfg, 21.4, 348.37, 214.13, 244.13);
  const auto c = lc::classify_case(cfg, spec);
  EXPECT_NEAR(c.xbar_Cf, 269.8, 1e-9);
  EXPECT_NEAR(c.u_bound, 264.0, 1e-9);
  EXPECT_EQ(c.label, lc::CaseLabel::kCase3);
}

TEST(ClassifyCase, TrichotomyOnConstructedInstances) {
  auto cfg = lc::reference_base();
  cfg.state_C = {0, 10};
  cfg.state_U = {100, 10};
  cfg.safety.d_C_fixed = 20.0;
  // Coast point 100, U bound 180 at t_f = 10.
  auto label = [&](double x_Cf) {
    return lc::classify_case(cfg, lc::fixed_terminal_spec(cfg, 10, 400, -50, x_Cf))
        .label;
  };
  EXPECT_EQ(label(150), lc::CaseLabel::kCase1);
  EXPECT_EQ(label(90), lc::CaseLabel::kCase2);
  EXPECT_EQ(label(180), lc::CaseLabel::kInfeasible);
  EXPECT_EQ(label(200), lc::CaseLabel::kInfeasible);
  cfg.state_U = {0, 10};
  cfg.safety.d_C_fixed = 0.5;
  EXPECT_EQ(label(95), lc::CaseLabel::kCase3);
}

TEST(PlanC, InfeasibleLabelAborts) {
  auto cfg = lc::reference_base();
  cfg.state_C = {0, 10};
  cfg.state_U = {100, 10};
  cfg.safety.d_C_fixed = 20.0;
  const auto spec = lc::fixed_terminal_spec(cfg, 10, 400, -50, 190);
  EXPECT_THROW(lc::plan_C(cfg, spec), lc::ManeuverAborted);
}

TEST(SolveConstrained, MatchesFrozenTranscriptionOptima) {
  const std::vector<std::pair<double, double>> frozen{
      {5.0, 16.964198}, {10.0, 19.53862}, {15.0, 25.87737}};
  for (const auto& [d_C, J] : frozen) {
    const auto f = third_case(d_C);
    const auto plan = lc::plan_C(f.cfg, f.spec);
    ASSERT_EQ(plan.label, lc::PlanLabel::kCase3Constrained) << d_C;
    EXPECT_NEAR(plan.cost(), J, 2e-3 * J) << d_C;
  }
}

TEST(SolveConstrained, EntryStructureAtTenMetres) {
  const auto f = third_case(10.0);
  const auto s = lc::solve_constrained(f.cfg, f.spec);
  EXPECT_NEAR(s.tau1, 3.898, 0.02);
  EXPECT_NEAR(s.a, f.cfg.x_U(s.tau1) - 10.0, 1e-9);
  const auto at = s.traj.evaluate(s.tau1);
  EXPECT_NEAR(at.x, s.a, 1e-6);
  EXPECT_NEAR(at.v, f.cfg.v_U(), 1e-6);
  EXPECT_NEAR(s.traj.terminal().x, f.spec.x_Cf, 1e-6);
  EXPECT_LT(std::abs(s.stationarity), 1e-2);
  for (double t : lc::control_jump_times(s.traj, 1e-7)) {
    EXPECT_NEAR(t, s.tau1, 1e-9);
  }
  EXPECT_LE(lc::testing::max_control(s.traj), 1e-9);
  EXPECT_GE(lc::min_U_slack(f.cfg, s.traj, 10.0, 4000), -1e-6);
}

TEST(SolveConstrained, CostIsMinimalOverEntryTimes) {
  const auto f = third_case(10.0);
  const auto s = lc::solve_constrained(f.cfg, f.spec);
  for (int k = 1; k < 200; ++k) {
    const auto c = lc::constrained_at(f.cfg, f.spec, f.spec.t_f * k / 200.0);
    if (c) EXPECT_GE(c->cost(), s.cost() - 1e-6);
  }
}

TEST(SolveConstrained, StartingOnTheBoundaryNeedsNoFirstLeg) {
  auto cfg = lc::reference_base();
  cfg.safety.d_C_fixed = 20.0;
  cfg.state_U = {100, 15};
  cfg.state_C = {80, 15};
  const double t_f = 10.0;
  const auto spec = lc::fixed_terminal_spec(cfg, t_f, 400, -50, 80 + 15 * t_f - 10);
  const auto c = lc::constrained_at(cfg, spec, 1e-4 * t_f);
  ASSERT_TRUE(c.has_value());
  EXPECT_LT(c->J1, 1e-6);
  lc::OcpProblem tail{{80, 15}, cfg.limits_C, 0.0, t_f, spec.x_Cf,
                      lc::ControlSign::kNonpos};
  EXPECT_NEAR(c->cost(), lc::solve_retard(tail).cost, 1e-2);
}

TEST(PlanC, RandomInstancesRespectSignsAndSpeedMatchOnBoundary) {
  Rng rng(41);
  std::map<lc::PlanLabel, int> seen;
  for (int i = 0; i < 400; ++i) {
    const auto ci = lc::testing::random_c_instance(rng);
    lc::CPlan plan;
    try {
      plan = lc::plan_C(ci.cfg, ci.spec);
    } catch (const lc::ManeuverError&) {
      continue;
    }
    ++seen[plan.label];
    const auto& traj = plan.traj();
    const double d_C = ci.spec.bounds.d_UC;
    EXPECT_NEAR(traj.terminal().x, ci.spec.x_Cf, 1e-6);
    if (plan.label == lc::PlanLabel::kCase1) {
      EXPECT_GE(lc::testing::min_control(traj), -1e-9);
      EXPECT_GT(lc::min_U_slack(ci.cfg, traj, d_C, 2000), 0.0);
    } else {
      EXPECT_LE(lc::testing::max_control(traj), 1e-9);
    }
    EXPECT_GE(lc::min_U_slack(ci.cfg, traj, d_C, 2000), -1e-6);
    EXPECT_LE(lc::testing::active_runs(ci.cfg, traj, d_C, 1e-7), 1);
    for (int k = 0; k <= 2000; ++k) {
      const double t = traj.t0() + (traj.tf() - traj.t0()) * k / 2000.0;
      const auto s = traj.evaluate(t);
      if (std::abs(ci.cfg.x_U(t) - s.x - d_C) <= 1e-9) {
        EXPECT_NEAR(s.v, ci.cfg.v_U(), 1e-6);
      }
    }
    if (plan.label == lc::PlanLabel::kCase3Constrained) {
      const auto& s = std::get<lc::ConstrainedArcSolution>(plan.solution);
      EXPECT_GT(s.tau1, 0.0);
      EXPECT_LT(s.tau1, ci.spec.t_f);
      EXPECT_NEAR(traj.evaluate(s.tau1).v, ci.cfg.v_U(), 1e-6);
      for (double t : lc::control_jump_times(traj, 1e-7)) {
        EXPECT_NEAR(t, s.tau1, 1e-9);
      }
    } else {
      EXPECT_TRUE(lc::control_jump_times(traj, 1e-7).empty());
    }
  }
  for (auto l : {lc::PlanLabel::kCase1, lc::PlanLabel::kCase2,
                 lc::PlanLabel::kCase3Unconstrained,
                 lc::PlanLabel::kCase3Constrained}) {
    EXPECT_GT(seen[l], 5) << lc::to_string(l);
  }
}

TEST(PlanC, ConstrainedCostMatchesTranscriptionAtFineGrid) {
  Rng rng(43);
  int compared = 0;
  for (int i = 0; i < 400 && compared < 4; ++i) {
    const auto ci = lc::testing::random_c_instance(rng);
    lc::CPlan plan;
    try {
      plan = lc::plan_C(ci.cfg, ci.spec);
    } catch (const lc::ManeuverError&) {
      continue;
    }
    if (plan.label != lc::PlanLabel::kCase3Constrained) continue;
    lc::OcpProblem p{ci.cfg.state_C, ci.cfg.limits_C, 0.0, ci.spec.t_f,
                     ci.spec.x_Cf, lc::ControlSign::kNonpos};
    auto tp = lc::TranscribedProblem::from_ocp(p, 800);
    tp.safety = lc::SafetyRows{ci.cfg.state_U.x, ci.cfg.v_U(), ci.spec.bounds.d_UC};
    const auto o = lc::solve_qp(tp);
    EXPECT_LE(lc::oracle_delta(plan.cost(), o.cost), 0.01);
    ++compared;
  }
  EXPECT_EQ(compared, 4);
}
