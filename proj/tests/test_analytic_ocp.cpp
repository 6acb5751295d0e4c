#include <gtest/gtest.h>

#include <cmath>

#include "lanechange/analytic_ocp.hpp"
#include "lanechange/errors.hpp"
#include "lanechange/oracle.hpp"
#include "support.hpp"

namespace lc = lanechange;
using lc::testing::Rng;
using lc::testing::uniform;

namespace {

lc::OcpProblem problem(double x0, double v0, double T, double xf,
                       lc::ControlSign sign) {
  lc::OcpProblem p;
  p.state_0 = {x0, v0};
  p.limits = lc::testing::reference_limits();
  p.t_f = T;
  p.x_f = xf;
  p.sign = sign;
  return p;
}

void expect_structure(const lc::OcpProblem& p, const lc::OcpSolution& s) {
  const bool adv = p.sign == lc::ControlSign::kNonneg;
  EXPECT_NEAR(s.traj.terminal().x, p.x_f, 1e-6);
  EXPECT_TRUE(lc::control_jump_times(s.traj, 1e-7).empty());
  double v_prev = p.state_0.v;
  for (int k = 0; k <= 400; ++k) {
    const double t = p.t_0 + (p.t_f - p.t_0) * k / 400.0;
    const double u = s.traj.control(t);
    const auto st = s.traj.evaluate(t);
    if (adv) {
      EXPECT_GE(u, -1e-9);
      EXPECT_LE(u, p.limits.u_max + 1e-9);
      EXPECT_GE(st.v, v_prev - 1e-9);
      EXPECT_LE(st.v, p.limits.v_max + 1e-9);
    } else {
      EXPECT_LE(u, 1e-9);
      EXPECT_GE(u, p.limits.u_min - 1e-9);
      EXPECT_LE(st.v, v_prev + 1e-9);
      EXPECT_GE(st.v, p.limits.v_min - 1e-9);
    }
    v_prev = st.v;
  }
  EXPECT_NEAR(s.traj.energy(), s.cost, 1e-9 * std::max(1.0, s.cost));
  const bool interior = adv ? s.case_id == lc::OcpCase::kV
                            : s.case_id == lc::OcpCase::kIV;
  if (interior) {
    const double T = p.t_f - p.t_0;
    const double E = p.x_f - p.state_0.x - p.state_0.v * T;
    EXPECT_NEAR(s.cost, 1.5 * E * E / (T * T * T), 1e-12 * std::max(1.0, s.cost));
  }
}

}  // namespace

TEST(SolveAdvance, CoastTargetCostsNothing) {
  const auto p = problem(5, 12, 8, 5 + 96, lc::ControlSign::kNonneg);
  const auto s = lc::solve_advance(p);
  EXPECT_EQ(s.case_id, lc::OcpCase::kV);
  EXPECT_DOUBLE_EQ(s.cost, 0.0);
  EXPECT_DOUBLE_EQ(lc::testing::max_control(s.traj), 0.0);
}

TEST(SolveAdvance, InteriorCaseClosedForm) {
  const auto p = problem(0, 10, 10, 120, lc::ControlSign::kNonneg);
  const auto s = lc::solve_advance(p);
  EXPECT_EQ(s.case_id, lc::OcpCase::kV);
  EXPECT_NEAR(s.cost, 0.6, 1e-12);
  EXPECT_NEAR(lc::interior_cost(p), 0.6, 1e-12);
  expect_structure(p, s);
}

TEST(SolveAdvance, CruisingLeaderOfFirstReferenceCase) {
  const auto p = problem(90, 13, 28.14, 455.82, lc::ControlSign::kNonneg);
  const auto s = lc::solve_advance(p);
  EXPECT_NEAR(s.cost, 0.0, 1e-12);
  for (double t : {0.0, 10.0, 28.14}) EXPECT_NEAR(s.traj.evaluate(t).v, 13.0, 1e-9);
}

TEST(SolveAdvance, TargetBehindCoastPointRejected) {
  const auto p = problem(90, 13, 28.14, 455.8, lc::ControlSign::kNonneg);
  EXPECT_THROW(lc::solve_advance(p), std::invalid_argument);
  auto q = problem(0, 10, 10, 120, lc::ControlSign::kNonneg);
  q.t_f = 0.0;
  EXPECT_THROW(lc::solve_advance(q), std::invalid_argument);
}

TEST(SolveAdvance, UnreachableTargetIsInfeasible) {
  const auto p = problem(0, 10, 5, 200, lc::ControlSign::kNonneg);
  EXPECT_THROW(lc::solve_advance(p), lc::OcpInfeasible);
}

TEST(SolveAdvance, SaturatedCasesNearEnvelope) {
  // Fast start reaches v_max early; slow start keeps u_max for a while.
  for (double v0 : {30.0, 5.0}) {
    auto p = problem(0, v0, 12, 0, lc::ControlSign::kNonneg);
    const double hi = lc::reach_envelope(p.state_0, p.limits, p.t_f).hi;
    p.x_f = v0 * p.t_f + 0.98 * (hi - v0 * p.t_f);
    const auto s = lc::solve_advance(p);
    EXPECT_NE(s.case_id, lc::OcpCase::kV);
    expect_structure(p, s);
  }
}

TEST(SolveRetard, CoastTargetCostsNothing) {
  const auto p = problem(0, 20, 10, 200, lc::ControlSign::kNonpos);
  EXPECT_DOUBLE_EQ(lc::solve_retard(p).cost, 0.0);
}

TEST(SolveRetard, InteriorCaseClosedForm) {
  const auto p = problem(0, 20, 10, 120, lc::ControlSign::kNonpos);
  const auto s = lc::solve_retard(p);
  EXPECT_EQ(s.case_id, lc::OcpCase::kIV);
  EXPECT_NEAR(s.cost, 9.6, 1e-12);
  expect_structure(p, s);
}

TEST(SolveRetard, FollowerOfFirstReferenceCaseMatchesFrozenOracleValue) {
  const auto p = problem(50, 18, 28.14, 273.24, lc::ControlSign::kNonpos);
  const auto s = lc::solve_retard(p);
  EXPECT_NEAR(s.cost, 5.4019531, 1e-5);
  EXPECT_LT(s.traj.terminal().v, 18.0);
  expect_structure(p, s);
}

TEST(SolveRetard, TargetAheadOfCoastPointRejected) {
  const auto p = problem(0, 20, 10, 201, lc::ControlSign::kNonpos);
  EXPECT_THROW(lc::solve_retard(p), std::invalid_argument);
}

TEST(SolveOcp, DispatchesOnSign) {
  const auto a = problem(0, 10, 10, 120, lc::ControlSign::kNonneg);
  const auto r = problem(0, 20, 10, 120, lc::ControlSign::kNonpos);
  EXPECT_DOUBLE_EQ(lc::solve_ocp(a).cost, lc::solve_advance(a).cost);
  EXPECT_DOUBLE_EQ(lc::solve_ocp(r).cost, lc::solve_retard(r).cost);
}

TEST(SolveOcp, RandomProblemsKeepSignContinuityAndTerminal) {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto p = i % 2 ? lc::testing::random_advance(rng)
                         : lc::testing::random_retard(rng);
    const auto s = lc::solve_ocp(p);
    expect_structure(p, s);
  }
}

TEST(SolveOcp, ShiftedStartTimeGivesSameCost) {
  auto p = problem(0, 10, 10, 120, lc::ControlSign::kNonneg);
  const double base = lc::solve_ocp(p).cost;
  p.t_0 = 3.0;
  p.t_f = 13.0;
  const auto s = lc::solve_ocp(p);
  EXPECT_NEAR(s.cost, base, 1e-12);
  EXPECT_DOUBLE_EQ(s.traj.t0(), 3.0);
}

TEST(SolveOcp, CostBracketsTranscribedOptimum) {
  Rng rng(37);
  for (int i = 0; i < 8; ++i) {
    const auto p = i % 2 ? lc::testing::random_advance(rng)
                         : lc::testing::random_retard(rng);
    const auto s = lc::solve_ocp(p);
    const auto o =
        lc::solve_qp(lc::TranscribedProblem::from_ocp(p, 500));
    const double scale = std::max(o.cost, 1e-9);
    EXPECT_LE(s.cost, o.cost + 0.01 * scale) << i;
    EXPECT_GE(s.cost, o.cost - 0.01 * scale) << i;
  }
}
