#include "lanechange/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "lanechange/errors.hpp"

namespace lanechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReg = 1e-12;
constexpr int kExtraIterations = 30;

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Bound {
  int var = 0;
  double value = 0.0;
  bool upper = false;
};

double step_to_boundary(const Vec& s, const Vec& ds) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (ds(i) < 0.0) a = std::min(a, -s(i) / ds(i));
  }
  return a;
}

std::vector<VehicleState> integrate(const VehicleState& s0,
                                    const std::vector<double>& u, double dt) {
  std::vector<VehicleState> out;
  out.reserve(u.size() + 1);
  out.push_back(s0);
  for (double uk : u) {
    const auto& s = out.back();
    out.push_back({s.x + s.v * dt + 0.5 * uk * dt * dt, s.v + uk * dt});
  }
  return out;
}

}  // namespace

TranscribedProblem TranscribedProblem::from_ocp(const OcpProblem& p, int N) {
  TranscribedProblem t;
  t.N = N;
  t.t_0 = p.t_0;
  t.t_f = p.t_f;
  t.state_0 = p.state_0;
  t.x_f = p.x_f;
  t.u_lo = p.sign == ControlSign::kNonneg ? 0.0 : p.limits.u_min;
  t.u_hi = p.sign == ControlSign::kNonneg ? p.limits.u_max : 0.0;
  t.v_lo = p.limits.v_min;
  t.v_hi = p.limits.v_max;
  return t;
}

Trajectory OracleSolution::to_trajectory() const {
  std::vector<ControlArc> arcs;
  arcs.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    arcs.push_back(ControlArc::constant(t_0 + k * dt, t_0 + (k + 1) * dt, u[k]));
  }
  return Trajectory(states.front(), std::move(arcs));
}

OracleSolution solve_qp(const TranscribedProblem& p, const OracleOptions& opts) {
  if (p.N < 2) throw std::invalid_argument("solve_qp: N < 2");
  if (!(p.t_f > p.t_0)) throw std::invalid_argument("solve_qp: empty horizon");
  if (!(p.u_lo <= p.u_hi) || !(p.v_lo <= p.v_hi)) {
    throw OracleInfeasible("solve_qp: empty box");
  }
  const int N = p.N;
  const double dt = p.dt();
  const int n = 3 * N;
  const int m = 2 * N + 1;
  auto iu = [](int k) { return k; };
  auto iv = [N](int k) { return N + k - 1; };  // k = 1..N
  auto ix = [N](int k) { return 2 * N + k - 1; };

  // Equality rows A z = b.
  std::vector<Eigen::Triplet<double>> trip;
  Vec b = Vec::Zero(m);
  for (int k = 0; k < N; ++k) {
    trip.emplace_back(k, iv(k + 1), 1.0);
    trip.emplace_back(k, iu(k), -dt);
    if (k > 0) {
      trip.emplace_back(k, iv(k), -1.0);
    } else {
      b(k) = p.state_0.v;
    }
    const int r = N + k;
    trip.emplace_back(r, ix(k + 1), 1.0);
    trip.emplace_back(r, iu(k), -0.5 * dt * dt);
    if (k > 0) {
      trip.emplace_back(r, ix(k), -1.0);
      trip.emplace_back(r, iv(k), -dt);
    } else {
      b(r) = p.state_0.x + dt * p.state_0.v;
    }
  }
  trip.emplace_back(2 * N, ix(N), 1.0);
  b(2 * N) = p.x_f;
  SpMat A(m, n);
  A.setFromTriplets(trip.begin(), trip.end());
  const SpMat At = A.transpose();

  // Simple bounds.
  std::vector<Bound> bounds;
  Vec lo = Vec::Constant(n, -kInf);
  Vec hi = Vec::Constant(n, kInf);
  for (int k = 0; k < N; ++k) {
    lo(iu(k)) = p.u_lo;
    hi(iu(k)) = p.u_hi;
    lo(iv(k + 1)) = p.v_lo;
    hi(iv(k + 1)) = p.v_hi;
    if (p.safety) hi(ix(k + 1)) = p.safety->bound((k + 1) * dt);
  }
  for (int j = 0; j < n; ++j) {
    if (lo(j) > hi(j)) throw OracleInfeasible("solve_qp: empty bound");
    if (std::isfinite(lo(j))) bounds.push_back({j, lo(j), false});
    if (std::isfinite(hi(j))) bounds.push_back({j, hi(j), true});
  }
  const int nb = static_cast<int>(bounds.size());

  // Inequalities g_j z_var + s_j = h_j, g_j = +1 for upper and -1 for lower.
  Vec g(nb);
  Vec h(nb);
  for (int j = 0; j < nb; ++j) {
    g(j) = bounds[j].upper ? 1.0 : -1.0;
    h(j) = bounds[j].upper ? bounds[j].value : -bounds[j].value;
  }
  auto gz = [&](const Vec& v) {
    Vec r(nb);
    for (int j = 0; j < nb; ++j) r(j) = g(j) * v(bounds[j].var);
    return r;
  };
  auto gt = [&](const Vec& w) {
    Vec r = Vec::Zero(n);
    for (int j = 0; j < nb; ++j) r(bounds[j].var) += g(j) * w(j);
    return r;
  };

  Vec hdiag = Vec::Zero(n);
  for (int k = 0; k < N; ++k) hdiag(iu(k)) = dt;

  // KKT pattern: [H + Sigma, A^T; A, -reg].
  std::vector<Eigen::Triplet<double>> kt;
  for (int j = 0; j < n; ++j) kt.emplace_back(j, j, 0.0);
  for (int r = 0; r < m; ++r) kt.emplace_back(n + r, n + r, -kReg);
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SpMat::InnerIterator it(A, c); it; ++it) {
      kt.emplace_back(n + it.row(), it.col(), it.value());
      kt.emplace_back(it.col(), n + it.row(), it.value());
    }
  }
  SpMat K(n + m, n + m);
  K.setFromTriplets(kt.begin(), kt.end());
  K.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(K);

  const double b_scale = 1.0 + std::max(b.lpNorm<Eigen::Infinity>(),
                                        nb ? h.lpNorm<Eigen::Infinity>() : 0.0);
  // Starting point from the unit-weight system, then shifted positive.
  Vec z;
  Vec lambda;
  {
    Vec sigma_diag = hdiag;
    for (int j = 0; j < nb; ++j) sigma_diag(bounds[j].var) += 1.0;
    for (int j = 0; j < n; ++j) K.coeffRef(j, j) = sigma_diag(j) + kReg;
    lu.factorize(K);
    if (lu.info() != Eigen::Success) {
      throw OracleNoConverge("solve_qp: KKT factorization failed");
    }
    Vec rhs(n + m);
    rhs.head(n) = gt(h);
    rhs.tail(m) = b;
    const Vec sol = lu.solve(rhs);
    z = sol.head(n);
    lambda = -sol.tail(m);
  }
  if (opts.start_seed) {
    std::mt19937_64 rng(*opts.start_seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    for (int j = 0; j < n; ++j) {
      const double w = hi(j) - lo(j);
      z(j) += std::isfinite(w) ? 0.5 * w * jitter(rng) : 5.0 * jitter(rng);
    }
  }
  Vec s = h - gz(z);
  Vec y = -s;
  if (nb > 0) {
    const double as = -s.minCoeff();
    if (as >= 0.0) s.array() += 1.0 + as;
    const double ay = -y.minCoeff();
    if (ay >= 0.0) y.array() += 1.0 + ay;
  }

  OracleSolution out;
  out.dt = dt;
  out.t_0 = p.t_0;
  std::optional<int> converged_at;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vec Hz = hdiag.cwiseProduct(z);
    const Vec rd = Hz - At * lambda + gt(y);
    const Vec rp = A * z - b;
    const Vec rs = gz(z) + s - h;
    const double mu = nb > 0 ? s.dot(y) / nb : 0.0;
    const double cost = 0.5 * z.dot(Hz);
    const double rp_norm =
        std::max(rp.lpNorm<Eigen::Infinity>(),
                 nb ? rs.lpNorm<Eigen::Infinity>() : 0.0) / b_scale;
    const double rd_norm =
        rd.lpNorm<Eigen::Infinity>() / (1.0 + Hz.lpNorm<Eigen::Infinity>());
    const double gap = nb * mu / (1.0 + std::abs(cost));
    const bool converged = rp_norm <= opts.tolerance &&
                           rd_norm <= opts.tolerance && gap <= opts.tolerance;
    // Tighter test relative to the cost scale for near-zero optima.
    const double scale = std::max(Hz.lpNorm<Eigen::Infinity>(), 1e-14);
    const bool tight = rd.lpNorm<Eigen::Infinity>() <= opts.tolerance * scale &&
                       nb * mu <= opts.tolerance * std::max(cost, 1e-14);
    if (converged) {
      if (!converged_at) converged_at = it;
      if (tight || it - *converged_at >= kExtraIterations) {
        out.iterations = it;
        break;
      }
    }
    if (y.size() > 0 && y.lpNorm<Eigen::Infinity>() > 1e14 && rp_norm > 1e-6) {
      throw OracleInfeasible("solve_qp: multipliers diverge");
    }
    if (it + 1 == opts.max_iterations && converged) {
      out.iterations = it;
      break;
    }
    if (it + 1 == opts.max_iterations) {
      if (rp_norm > 1e-6) throw OracleInfeasible("solve_qp: primal residual stalled");
      throw OracleNoConverge("solve_qp: iteration limit");
    }

    const Vec w = y.cwiseQuotient(s);
    Vec sigma_diag = hdiag;
    for (int j = 0; j < nb; ++j) sigma_diag(bounds[j].var) += w(j);
    for (int j = 0; j < n; ++j) K.coeffRef(j, j) = sigma_diag(j) + kReg;
    lu.factorize(K);
    if (lu.info() != Eigen::Success) {
      if (converged) {
        out.iterations = it;
        break;
      }
      throw OracleNoConverge("solve_qp: KKT factorization failed");
    }

    // Newton step for a complementarity residual rc = S y - target.
    auto direction = [&](const Vec& rc, Vec& dz, Vec& dl, Vec& ds, Vec& dy) {
      Vec rhs(n + m);
      rhs.head(n) = -rd + gt((rc - y.cwiseProduct(rs)).cwiseQuotient(s));
      rhs.tail(m) = -rp;
      const Vec sol = lu.solve(rhs);
      dz = sol.head(n);
      dl = -sol.tail(m);
      ds = -rs - gz(dz);
      dy = (-rc - y.cwiseProduct(ds)).cwiseQuotient(s);
    };

    Vec dz;
    Vec dl;
    Vec ds;
    Vec dy;
    const Vec sy = s.cwiseProduct(y);
    direction(sy, dz, dl, ds, dy);
    double ap = step_to_boundary(s, ds);
    double ad = step_to_boundary(y, dy);
    if (nb > 0) {
      const double mu_aff = (s + ap * ds).dot(y + ad * dy) / nb;
      const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
      const Vec rc = sy + ds.cwiseProduct(dy) - Vec::Constant(nb, sigma * mu);
      direction(rc, dz, dl, ds, dy);
      const double eta = std::clamp(1.0 - mu, 0.995, 1.0 - 1e-6);
      ap = std::min(1.0, eta * step_to_boundary(s, ds));
      ad = std::min(1.0, eta * step_to_boundary(y, dy));
    }
    z += ap * dz;
    s += ap * ds;
    lambda += ad * dl;
    y += ad * dy;
    out.iterations = it + 1;
  }

  out.u.resize(N);
  for (int k = 0; k < N; ++k) out.u[k] = std::clamp(z(iu(k)), p.u_lo, p.u_hi);
  out.states = integrate(p.state_0, out.u, dt);
  double j = 0.0;
  for (double uk : out.u) j += uk * uk;
  out.cost = 0.5 * dt * j;
  return out;
}

std::vector<double> refine_convergence(TranscribedProblem p,
                                       const std::vector<int>& N_list,
                                       const OracleOptions& opts) {
  std::vector<double> costs;
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (i > 0 && N_list[i] <= N_list[i - 1]) {
      throw std::invalid_argument("refine_convergence: N_list not increasing");
    }
    p.N = N_list[i];
    costs.push_back(solve_qp(p, opts).cost);
  }
  return costs;
}

}  // namespace lanechange
