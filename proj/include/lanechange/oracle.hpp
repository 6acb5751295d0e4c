#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lanechange/analytic_ocp.hpp"
#include "lanechange/core.hpp"

namespace lanechange {

// Upper bound x_k <= x_U0 + v_U * (t_k - t_0) - d_C on every grid node.
struct SafetyRows {
  double x_U0 = 0.0;
  double v_U = 0.0;
  double d_C = 0.0;

  double bound(double elapsed) const { return x_U0 + v_U * elapsed - d_C; }
};

struct TranscribedProblem {
  int N = 500;
  double t_0 = 0.0;
  double t_f = 1.0;
  VehicleState state_0;
  double x_f = 0.0;
  double u_lo = 0.0;
  double u_hi = 0.0;
  double v_lo = 0.0;
  double v_hi = 0.0;
  std::optional<SafetyRows> safety;

  double dt() const { return (t_f - t_0) / N; }

  // Box from the limits intersected with the sign restriction.
  static TranscribedProblem from_ocp(const OcpProblem& p, int N);
};

struct OracleOptions {
  // Relative KKT residual.
  double tolerance = 1e-8;
  int max_iterations = 200;
  // Randomized interior starting point for restart checks.
  std::optional<std::uint64_t> start_seed;
};

struct OracleSolution {
  std::vector<double> u;
  // Node states 0..N from exact zero-order-hold integration of u.
  std::vector<VehicleState> states;
  double cost = 0.0;
  int iterations = 0;
  double dt = 0.0;
  double t_0 = 0.0;

  Trajectory to_trajectory() const;
};

// Throws OracleInfeasible or OracleNoConverge.
OracleSolution solve_qp(const TranscribedProblem& p,
                        const OracleOptions& opts = {});

std::vector<double> refine_convergence(TranscribedProblem p,
                                       const std::vector<int>& N_list,
                                       const OracleOptions& opts = {});

}  // namespace lanechange
