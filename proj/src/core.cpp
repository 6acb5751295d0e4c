#include "lanechange/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lanechange/errors.hpp"

namespace lanechange {

namespace {

constexpr double kTileTol = 1e-9;

}  // namespace

void VehicleLimits::validate(const std::string& who) const {
  auto finite = [](double a) { return std::isfinite(a); };
  if (!finite(u_min) || !finite(u_max) || !finite(v_min) || !finite(v_max)) {
    throw InvalidScenario(who + ": limits must be finite");
  }
  if (!(u_min < 0.0 && 0.0 < u_max)) {
    throw InvalidScenario(who + ": require u_min < 0 < u_max");
  }
  if (!(0.0 <= v_min && v_min < v_max)) {
    throw InvalidScenario(who + ": require 0 <= v_min < v_max");
  }
}

double safe_distance(double v, const SafetyModel& model) {
  if (!(v >= 0.0)) throw std::domain_error("safe_distance: negative speed");
  return model.phi * v + model.delta;
}

ControlArc ControlArc::constant(double t_start, double t_end, double u) {
  return {t_start, t_end, ControlLaw::kConstant, u, 0.0};
}

ControlArc ControlArc::linear(double t_start, double t_end, double u0,
                              double slope) {
  return {t_start, t_end, ControlLaw::kLinear, u0, slope};
}

VehicleState propagate(const VehicleState& s, const ControlArc& arc,
                       double dt) {
  const double dt2 = dt * dt;
  return {s.x + s.v * dt + 0.5 * arc.u0 * dt2 + arc.slope * dt2 * dt / 6.0,
          s.v + arc.u0 * dt + 0.5 * arc.slope * dt2};
}

Trajectory::Trajectory(VehicleState state_0, std::vector<ControlArc> arcs)
    : state_0_(state_0), arcs_(std::move(arcs)) {
  if (arcs_.empty()) throw std::invalid_argument("trajectory: no arcs");
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const auto& a = arcs_[i];
    if (!(a.t_end > a.t_start)) {
      throw std::invalid_argument("trajectory: arc with t_end <= t_start");
    }
    if (i > 0 && std::abs(a.t_start - arcs_[i - 1].t_end) > kTileTol) {
      throw std::invalid_argument("trajectory: arcs do not tile");
    }
  }
  starts_.reserve(arcs_.size());
  VehicleState s = state_0_;
  for (const auto& a : arcs_) {
    starts_.push_back(s);
    s = propagate(s, a, a.duration());
  }
}

Trajectory Trajectory::coast(VehicleState state_0, double t0, double tf) {
  return Trajectory(state_0, {ControlArc::constant(t0, tf, 0.0)});
}

std::size_t Trajectory::locate(double t) const {
  auto it = std::upper_bound(
      arcs_.begin(), arcs_.end(), t,
      [](double value, const ControlArc& a) { return value < a.t_start; });
  std::size_t i = it == arcs_.begin() ? 0 : (it - arcs_.begin()) - 1;
  return std::min(i, arcs_.size() - 1);
}

VehicleState Trajectory::evaluate(double t) const {
  if (arcs_.empty()) throw std::domain_error("evaluate: empty trajectory");
  const double scale = std::max(1.0, std::abs(tf()));
  if (t < t0() - 1e-12 * scale || t > tf() + 1e-12 * scale || std::isnan(t)) {
    throw std::domain_error("evaluate: time outside horizon");
  }
  const std::size_t i = locate(t);
  const double dt = std::clamp(t - arcs_[i].t_start, 0.0, arcs_[i].duration());
  return propagate(starts_[i], arcs_[i], dt);
}

double Trajectory::control(double t) const {
  if (arcs_.empty()) throw std::domain_error("control: empty trajectory");
  const std::size_t i = locate(std::min(t, tf()));
  const auto& a = arcs_[i];
  return a.control(std::clamp(t, a.t_start, a.t_end));
}

VehicleState Trajectory::terminal() const {
  const auto& a = arcs_.back();
  return propagate(starts_.back(), a, a.duration());
}

double Trajectory::energy() const {
  double j = 0.0;
  for (const auto& a : arcs_) {
    const double h = a.duration();
    j += a.u0 * a.u0 * h + a.u0 * a.slope * h * h +
         a.slope * a.slope * h * h * h / 3.0;
  }
  return 0.5 * j;
}

Trajectory Trajectory::then(const Trajectory& tail) const {
  if (tail.empty()) return *this;
  if (empty()) return tail;
  if (std::abs(tail.t0() - tf()) > kTileTol) {
    throw std::invalid_argument("trajectory: tail does not start at tf");
  }
  std::vector<ControlArc> arcs = arcs_;
  arcs.insert(arcs.end(), tail.arcs_.begin(), tail.arcs_.end());
  arcs[arcs_.size()].t_start = arcs_.back().t_end;
  return Trajectory(state_0_, std::move(arcs));
}

VehicleState evaluate(const Trajectory& traj, double t) {
  return traj.evaluate(t);
}

std::vector<double> control_jump_times(const Trajectory& traj, double tol) {
  std::vector<double> out;
  const auto arcs = traj.arcs();
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    if (std::abs(arcs[i].u0 - arcs[i - 1].u_end()) > tol) {
      out.push_back(arcs[i].t_start);
    }
  }
  return out;
}

}  // namespace lanechange
