#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "lanechange/errors.hpp"
#include "lanechange/io.hpp"
#include "lanechange/pipeline.hpp"
#include "lanechange/reproduce.hpp"

namespace fs = std::filesystem;
using namespace lanechange;

namespace {

enum Exit { kOk = 0, kInput = 1, kAborted = 2, kFailed = 3 };

struct Flags {
  double dt = 0.01;
  int samples = 1000;
  int oracle_n = 500;
  double tolerance = 0.01;
  std::string out = "out";

  PlanOptions plan_options() const {
    PlanOptions o;
    o.n_samples = samples;
    o.oracle_n = oracle_n;
    o.tolerance = tolerance;
    return o;
  }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

int run_plan(const std::string& path, const Flags& f, std::ostream& log) {
  try {
    const ScenarioFile sf = load_scenario(path);
    const PlanReport rep = plan_maneuver(sf.cfg, sf.overrides, f.plan_options());
    fs::create_directories(f.out);
    const std::string stem = fs::path(path).stem().string();
    std::ostringstream csv;
    write_trajectory_csv(csv, rep.plan, sf.cfg, f.dt);
    write_file(fs::path(f.out) / (stem + ".trajectory.csv"), csv.str());
    write_file(fs::path(f.out) / (stem + ".report.json"),
               report_to_json(rep).dump(2) + "\n");
    log << report_summary(rep);
    return rep.verdict_ok ? kOk : kFailed;
  } catch (const ManeuverError& e) {
    log << "aborted: " << e.what() << '\n';
    return kAborted;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kInput;
  }
}

int run_validate(const std::string& scenario, const std::string& table) {
  try {
    const ScenarioFile sf = load_scenario(scenario);
    std::ifstream is(table);
    if (!is) throw InvalidScenario("cannot open " + table);
    const auto rows = read_trajectory_csv(is);
    const SafetyAudit a = audit_rows(rows, sf.cfg, table_d_C(sf.cfg, rows));
    for (const auto& e : a.entries) {
      std::cout << e.name << " min slack " << e.min_slack << " at t=" << e.at_time
                << '\n';
    }
    std::cout << (a.pass ? "pass" : "fail") << '\n';
    return a.pass ? kOk : kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}

int run_reproduce(const Flags& f) {
  const ReproSummary s = reproduce_paper(f.plan_options());
  std::cout << format_table(s);
  try {
    fs::create_directories(f.out);
    write_file(fs::path(f.out) / "reproduce.json",
               summary_to_json(s).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return s.pass() ? kOk : kFailed;
}

int run_sweep(const std::vector<std::string>& paths, const Flags& f) {
  std::vector<std::future<std::pair<int, std::string>>> jobs;
  jobs.reserve(paths.size());
  for (const auto& p : paths) {
    jobs.push_back(std::async(std::launch::async, [p, &f] {
      std::ostringstream log;
      const int code = run_plan(p, f, log);
      return std::make_pair(code, log.str());
    }));
  }
  int worst = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto [code, log] = jobs[i].get();
    std::cout << "== " << paths[i] << " exit " << code << '\n' << log;
    worst = std::max(worst, code);
  }
  return worst;
}

void add_plan_flags(CLI::App* app, Flags& f) {
  app->add_option("--dt", f.dt, "trajectory table step [s]")
      ->check(CLI::PositiveNumber);
  app->add_option("--samples", f.samples, "audit samples")
      ->check(CLI::PositiveNumber);
  app->add_option("--oracle-n", f.oracle_n, "oracle grid size")
      ->check(CLI::Range(2, 100000));
  app->add_option("--tolerance", f.tolerance, "oracle relative tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative lane-change maneuver planner"};
  app.require_subcommand(1);
  Flags f;

  std::string scenario;
  auto* plan = app.add_subcommand("plan", "plan one scenario");
  plan->add_option("scenario", scenario, "scenario file")->required();
  add_plan_flags(plan, f);

  std::string table;
  auto* validate = app.add_subcommand("validate", "audit a trajectory table");
  validate->add_option("scenario", scenario, "scenario file")->required();
  validate->add_option("trajectory", table, "trajectory CSV")->required();

  auto* reproduce =
      app.add_subcommand("reproduce-paper", "run the reference scenarios");
  add_plan_flags(reproduce, f);

  std::vector<std::string> batch;
  auto* sweep = app.add_subcommand("sweep", "plan several scenarios concurrently");
  sweep->add_option("scenarios", batch, "scenario files")->required();
  add_plan_flags(sweep, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  if (*plan) return run_plan(scenario, f, std::cout);
  if (*validate) return run_validate(scenario, table);
  if (*reproduce) return run_reproduce(f);
  return run_sweep(batch, f);
}
