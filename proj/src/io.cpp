#include "lanechange/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "lanechange/errors.hpp"

namespace lanechange {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw InvalidScenario(where + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) {
      throw InvalidScenario(where + ": unknown field '" + k + "'");
    }
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) {
    throw InvalidScenario(where + ": missing field '" + key + "'");
  }
  const auto& v = j.at(key);
  if (!v.is_number()) {
    throw InvalidScenario(where + "." + key + ": expected a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidScenario(where + "." + key + ": not finite");
  return d;
}

void maybe(const json& j, const std::string& key, const std::string& where,
           double& out) {
  if (j.contains(key)) out = number(j, key, where);
}

VehicleState parse_state(const json& j, const std::string& where) {
  check_keys(j, {"x", "v"}, where);
  return {number(j, "x", where), number(j, "v", where)};
}

VehicleLimits parse_limits(const json& j, const std::string& where) {
  check_keys(j, {"u_min", "u_max", "v_min", "v_max"}, where);
  return {number(j, "u_min", where), number(j, "u_max", where),
          number(j, "v_min", where), number(j, "v_max", where)};
}

json state_json(const VehicleState& s) { return {{"x", s.x}, {"v", s.v}}; }

json limits_json(const VehicleLimits& l) {
  return {{"u_min", l.u_min}, {"u_max", l.u_max}, {"v_min", l.v_min},
          {"v_max", l.v_max}};
}

json opt(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

ScenarioFile parse_scenario(const json& j) {
  check_keys(j, {"schema_version", "scenario", "overrides"}, "root");
  ScenarioFile f;
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
    throw InvalidScenario("root: schema_version must be an integer");
  }
  f.schema_version = j.at("schema_version").get<int>();
  if (f.schema_version != kSchemaVersion) {
    throw InvalidScenario("unsupported schema_version " +
                          std::to_string(f.schema_version));
  }
  if (!j.contains("scenario")) throw InvalidScenario("root: missing 'scenario'");
  const json& s = j.at("scenario");
  check_keys(s,
             {"vehicles", "limits", "alpha", "rho", "T_max", "beta0", "safety",
              "eps_margin", "min_horizon"},
             "scenario");
  ScenarioConfig& c = f.cfg;
  if (!s.contains("vehicles")) throw InvalidScenario("scenario: missing 'vehicles'");
  const json& veh = s.at("vehicles");
  check_keys(veh, {"1", "2", "C", "U"}, "scenario.vehicles");
  for (const char* k : {"1", "2", "C", "U"}) {
    if (!veh.contains(k)) {
      throw InvalidScenario(std::string("scenario.vehicles: missing '") + k + "'");
    }
  }
  c.state_1 = parse_state(veh.at("1"), "scenario.vehicles.1");
  c.state_2 = parse_state(veh.at("2"), "scenario.vehicles.2");
  c.state_C = parse_state(veh.at("C"), "scenario.vehicles.C");
  c.state_U = parse_state(veh.at("U"), "scenario.vehicles.U");
  if (s.contains("limits")) {
    const json& l = s.at("limits");
    check_keys(l, {"1", "2", "C"}, "scenario.limits");
    if (l.contains("1")) c.limits_1 = parse_limits(l.at("1"), "scenario.limits.1");
    if (l.contains("2")) c.limits_2 = parse_limits(l.at("2"), "scenario.limits.2");
    if (l.contains("C")) c.limits_C = parse_limits(l.at("C"), "scenario.limits.C");
  }
  if (s.contains("alpha")) {
    const json& a = s.at("alpha");
    check_keys(a, {"1", "2", "C"}, "scenario.alpha");
    maybe(a, "1", "scenario.alpha", c.alpha_1);
    maybe(a, "2", "scenario.alpha", c.alpha_2);
    maybe(a, "C", "scenario.alpha", c.alpha_C);
  }
  maybe(s, "rho", "scenario", c.rho);
  maybe(s, "T_max", "scenario", c.T_max);
  maybe(s, "beta0", "scenario", c.beta0);
  maybe(s, "eps_margin", "scenario", c.eps_margin);
  maybe(s, "min_horizon", "scenario", c.min_horizon);
  if (s.contains("safety")) {
    const json& sf = s.at("safety");
    check_keys(sf, {"phi", "delta"}, "scenario.safety");
    maybe(sf, "phi", "scenario.safety", c.safety.phi);
    maybe(sf, "delta", "scenario.safety", c.safety.delta);
  }
  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    check_keys(o, {"t_f", "terminal", "d_C_fixed"}, "overrides");
    if (o.contains("t_f")) f.overrides.t_f = number(o, "t_f", "overrides");
    if (o.contains("d_C_fixed")) {
      c.safety.d_C_fixed = number(o, "d_C_fixed", "overrides");
    }
    if (o.contains("terminal")) {
      const json& t = o.at("terminal");
      check_keys(t, {"x_1f", "x_2f", "x_Cf"}, "overrides.terminal");
      f.overrides.terminal = {number(t, "x_1f", "overrides.terminal"),
                              number(t, "x_2f", "overrides.terminal"),
                              number(t, "x_Cf", "overrides.terminal")};
      if (!f.overrides.t_f) {
        throw InvalidScenario("overrides.terminal requires overrides.t_f");
      }
    }
  }
  c.validate();
  return f;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidScenario("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidScenario(path + ": " + e.what());
  }
  return parse_scenario(j);
}

json scenario_to_json(const ScenarioFile& f) {
  const ScenarioConfig& c = f.cfg;
  json s = {
      {"vehicles",
       {{"1", state_json(c.state_1)},
        {"2", state_json(c.state_2)},
        {"C", state_json(c.state_C)},
        {"U", state_json(c.state_U)}}},
      {"limits",
       {{"1", limits_json(c.limits_1)},
        {"2", limits_json(c.limits_2)},
        {"C", limits_json(c.limits_C)}}},
      {"alpha", {{"1", c.alpha_1}, {"2", c.alpha_2}, {"C", c.alpha_C}}},
      {"rho", c.rho},
      {"T_max", c.T_max},
      {"beta0", c.beta0},
      {"eps_margin", c.eps_margin},
      {"min_horizon", c.min_horizon},
      {"safety", {{"phi", c.safety.phi}, {"delta", c.safety.delta}}},
  };
  json out = {{"schema_version", f.schema_version}, {"scenario", s}};
  json o = json::object();
  if (f.overrides.t_f) o["t_f"] = *f.overrides.t_f;
  if (c.safety.d_C_fixed) o["d_C_fixed"] = *c.safety.d_C_fixed;
  if (f.overrides.terminal) {
    const auto& t = *f.overrides.terminal;
    o["terminal"] = {{"x_1f", t[0]}, {"x_2f", t[1]}, {"x_Cf", t[2]}};
  }
  if (!o.empty()) out["overrides"] = o;
  return out;
}

std::vector<double> table_times(double t_f, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("table_times: dt <= 0");
  std::vector<double> ts;
  const long n = static_cast<long>(std::floor(t_f / dt + 1e-9));
  for (long i = 0; i <= n; ++i) ts.push_back(std::min(i * dt, t_f));
  if (t_f - ts.back() > 1e-9 * std::max(1.0, t_f)) {
    ts.push_back(t_f);
  } else {
    ts.back() = t_f;
  }
  return ts;
}

void write_trajectory_csv(std::ostream& os, const ManeuverPlan& plan,
                          const ScenarioConfig& cfg, double dt) {
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    os << (i ? "," : "") << cols[i];
  }
  os << '\n';
  const double dC = plan.terminal.bounds.d_UC;
  const auto rows = sample_plan(plan.traj_1, plan.traj_2, plan.traj_C,
                                table_times(plan.terminal.t_f, dt));
  for (const auto& r : rows) {
    const double xU = cfg.x_U(r.t);
    const double d2 = safe_distance(std::max(r.s2.v, 0.0), cfg.safety);
    const double vals[] = {r.t,    r.s1.x, r.s1.v, r.u1,        r.s2.x,
                           r.s2.v, r.u2,   r.sC.x, r.sC.v,      r.uC,
                           xU,     xU - r.sC.x - dC, r.s1.x - r.s2.x - d2};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      os << (i ? "," : "") << fmt12(vals[i]);
    }
    os << '\n';
  }
}

std::vector<SampleRow> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidScenario("trajectory: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::vector<std::string> header;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    if (header != trajectory_columns()) {
      throw InvalidScenario("trajectory: header does not match the schema");
    }
  }
  std::vector<SampleRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidScenario("trajectory: bad number on line " +
                              std::to_string(lineno));
      }
    }
    if (v.size() != trajectory_columns().size()) {
      throw InvalidScenario("trajectory: wrong column count on line " +
                            std::to_string(lineno));
    }
    rows.push_back({v[0], {v[1], v[2]}, v[3], {v[4], v[5]}, v[6],
                    {v[7], v[8]}, v[9]});
  }
  if (rows.size() < 2) throw InvalidScenario("trajectory: fewer than two rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].t > rows[i - 1].t)) {
      throw InvalidScenario("trajectory: time column is not increasing");
    }
  }
  return rows;
}

double table_d_C(const ScenarioConfig& cfg, const std::vector<SampleRow>& rows) {
  const auto& last = rows.back();
  return fixed_terminal_spec(cfg, last.t, last.s1.x, last.s2.x, last.sC.x)
      .bounds.d_UC;
}

json audit_to_json(const SafetyAudit& a) {
  json entries = json::array();
  for (const auto& e : a.entries) {
    entries.push_back(
        {{"name", e.name}, {"min_slack", e.min_slack}, {"at_time", e.at_time}});
  }
  return {{"pass", a.pass}, {"entries", entries}};
}

json report_to_json(const PlanReport& r) {
  const auto& s = r.plan.terminal;
  json terminal = {
      {"t_f", s.t_f},
      {"x_1f", s.x_1f},
      {"x_2f", s.x_2f},
      {"x_Cf", s.x_Cf},
      {"delta_x", {{"1", s.delta_x[0]}, {"2", s.delta_x[1]}, {"C", s.delta_x[2]}}},
      {"branch", to_string(s.branch)},
      {"bounds", {{"d_1C", s.bounds.d_1C}, {"d_C2", s.bounds.d_C2}, {"d_UC", s.bounds.d_UC}}},
      {"relax_iterations", r.relax_iterations},
  };
  if (r.timing) {
    terminal["min_terminal_time"] = {
        {"t_f", r.timing->t_f},
        {"branch", to_string(r.timing->branch)},
        {"alpha", r.timing->alpha},
        {"alpha_rounds", r.timing->alpha_rounds},
        {"floored", r.timing->floored},
    };
  }
  json vehicles = json::array();
  for (const auto& v : r.vehicles) {
    json o = {{"name", v.name},
              {"case", v.case_id},
              {"t1", opt(v.t1)},
              {"tau", opt(v.tau)},
              {"energy_half", v.energy_half},
              {"energy_full", v.energy_full},
              {"oracle_energy_half", opt(v.oracle_energy)},
              {"oracle_delta", opt(v.oracle_delta)}};
    if (!v.oracle_error.empty()) o["oracle_error"] = v.oracle_error;
    vehicles.push_back(o);
  }
  const auto& cls = r.classification;
  json out = {
      {"terminal", terminal},
      {"classification",
       {{"xbar_Cf", cls.xbar_Cf}, {"u_bound", cls.u_bound}, {"x_Cf", cls.x_Cf},
        {"label", to_string(cls.label)}}},
      {"case_label", to_string(r.plan.case_label)},
      {"vehicles", vehicles},
      {"total_energy_half", r.total_energy_half()},
      {"total_energy_full", r.total_energy_full()},
      {"weighted_cost", r.weighted_cost},
      {"w_t", r.w_t},
      {"audit", audit_to_json(r.plan.audit)},
      {"oracle_checked", r.oracle_checked},
      {"oracle_ok", r.oracle_ok},
      {"verdict", r.verdict_ok ? "ok" : "fail"},
  };
  if (r.constrained) {
    const auto& c = *r.constrained;
    out["constrained_arc"] = {{"tau1", c.tau1},
                              {"a", c.a},
                              {"tau2", opt(c.tau2)},
                              {"subcase", to_string(c.subcase)},
                              {"J1", c.J1},
                              {"J2", c.J2},
                              {"stationarity", c.stationarity}};
  }
  if (!r.advice.empty()) out["advice"] = r.advice;
  return out;
}

std::string report_summary(const PlanReport& r) {
  std::ostringstream os;
  const auto& s = r.plan.terminal;
  os << "t_f " << fmt9(s.t_f) << " s (" << to_string(s.branch) << ")\n";
  os << "x_1f " << fmt9(s.x_1f) << "  x_2f " << fmt9(s.x_2f) << "  x_Cf "
     << fmt9(s.x_Cf) << '\n';
  os << "vehicle C: " << to_string(r.plan.case_label) << '\n';
  if (r.constrained) {
    os << "  tau1 " << fmt9(r.constrained->tau1) << " s  a "
       << fmt9(r.constrained->a) << " m\n";
  }
  for (const auto& v : r.vehicles) {
    os << "vehicle " << v.name << ": case " << v.case_id << "  J "
       << fmt9(v.energy_half);
    if (v.oracle_delta) os << "  oracle delta " << fmt9(*v.oracle_delta);
    if (!v.oracle_error.empty()) os << "  oracle error: " << v.oracle_error;
    os << '\n';
  }
  os << "audit " << (r.plan.audit.pass ? "pass" : "FAIL");
  for (const auto& e : r.plan.audit.entries) {
    os << "\n  " << e.name << " min slack " << fmt9(e.min_slack) << " at t="
       << fmt9(e.at_time);
  }
  os << "\nverdict " << (r.verdict_ok ? "ok" : "fail") << '\n';
  if (!r.advice.empty()) os << "advice: " << r.advice << '\n';
  return os.str();
}

}  // namespace lanechange
