#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lanechange {

struct VehicleState {
  double x = 0.0;
  double v = 0.0;
};

struct VehicleLimits {
  double u_min = -7.0;
  double u_max = 3.3;
  double v_min = 1.0;
  double v_max = 33.0;

  // Throws InvalidScenario.
  void validate(const std::string& who) const;
};

struct SafetyModel {
  double phi = 1.8;
  double delta = 5.0;
  std::optional<double> d_C_fixed;
};

double safe_distance(double v, const SafetyModel& model);

enum class ControlLaw { kConstant, kLinear };

/// One piece of a piecewise control, u(t) = u0 + slope * (t - t_start).
struct ControlArc {
  double t_start = 0.0;
  double t_end = 0.0;
  ControlLaw law = ControlLaw::kConstant;
  double u0 = 0.0;
  double slope = 0.0;

  static ControlArc constant(double t_start, double t_end, double u);
  static ControlArc linear(double t_start, double t_end, double u0,
                           double slope);

  double duration() const { return t_end - t_start; }
  double control(double t) const { return u0 + slope * (t - t_start); }
  double u_end() const { return control(t_end); }
};

/// State after integrating one arc for dt seconds from `s`.
VehicleState propagate(const VehicleState& s, const ControlArc& arc, double dt);

/// Piecewise control profile with closed-form state evolution.
class Trajectory {
 public:
  Trajectory() = default;
  // Arcs must tile [arcs.front().t_start, arcs.back().t_end]. Throws
  // std::invalid_argument otherwise.
  Trajectory(VehicleState state_0, std::vector<ControlArc> arcs);

  static Trajectory coast(VehicleState state_0, double t0, double tf);

  double t0() const { return arcs_.empty() ? 0.0 : arcs_.front().t_start; }
  double tf() const { return arcs_.empty() ? 0.0 : arcs_.back().t_end; }
  const VehicleState& state_0() const { return state_0_; }
  std::span<const ControlArc> arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }

  // Throws std::domain_error outside [t0, tf].
  VehicleState evaluate(double t) const;
  // Right-continuous, left limit at tf.
  double control(double t) const;
  VehicleState arc_start_state(std::size_t i) const { return starts_[i]; }
  VehicleState terminal() const;

  // Exact integral of u^2 / 2 over the horizon.
  double energy() const;

  // Appends `tail`, which must start at tf(). The tail's own state_0 is
  // ignored; continuity comes from this trajectory.
  Trajectory then(const Trajectory& tail) const;

 private:
  std::size_t locate(double t) const;

  VehicleState state_0_;
  std::vector<ControlArc> arcs_;
  std::vector<VehicleState> starts_;
};

VehicleState evaluate(const Trajectory& traj, double t);

// Arc boundaries where the control jumps by more than tol.
std::vector<double> control_jump_times(const Trajectory& traj, double tol);

}  // namespace lanechange
