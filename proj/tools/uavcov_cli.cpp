#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "uavcov/harness.hpp"

namespace fs = std::filesystem;
using namespace uavcov;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeFault = 3;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

struct SimulateArgs {
  std::string config;
  std::string method;
  std::string mode;
  std::string start_policy;
  int trials = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool fly = false;
  double beta = 0.0;
  std::string out = "out";
  unsigned workers = 0;
};

ScenarioConfig resolve(const SimulateArgs& a, const CLI::App& cmd) {
  ScenarioConfig c = ScenarioConfig::load(a.config);
  if (!a.method.empty()) c.method = parse_method(a.method);
  if (!a.mode.empty()) {
    try {
      c.mode = parse_schedule_mode(a.mode);
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }
  if (!a.start_policy.empty()) {
    try {
      c.start_policy = parse_start_policy(a.start_policy);
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }
  if (cmd.count("--trials")) c.trials = a.trials;
  if (cmd.count("--seed")) c.seed = a.seed;
  if (cmd.count("--beta")) c.beta = a.beta;
  if (a.fly) c.fly = true;
  c.validate();
  return c;
}

int run_simulate(const SimulateArgs& a, const CLI::App& cmd) {
  const ScenarioConfig c = resolve(a, cmd);
  const unsigned workers = a.workers ? a.workers : std::max(1u, std::thread::hardware_concurrency());
  const MonteCarloResult mc = monte_carlo(c, workers);

  const fs::path out(a.out);
  fs::create_directories(out);
  write_file(out / "metrics.csv", mc.metrics_csv());
  write_file(out / "summary.json", mc.summary_json(c));
  write_file(out / "config.json", c.to_json());

  // Maps, graph and deployment of the first trial.
  const Scene scene = build_scenario(c, trial_seed(c.seed, 0));
  TrialArtifacts art;
  run_method(scene, c, &art);
  write_file(out / "scene.json", scene.to_json());
  write_file(out / "graph.json", art.graph.to_json());
  write_file(out / "deployment.json", deployment_to_json(art.units));
  write_file(out / "heatmap_before.csv", art.before.to_csv());
  write_file(out / "heatmap_after.csv", art.after.to_csv());
  if (art.trajectory) {
    std::size_t first = 0;
    for (std::size_t u = 0; u < art.units.size(); ++u) {
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < art.units[u].positions.size(); ++k) cols.push_back(first + k);
      first += cols.size();
      write_file(out / ("trajectory_" + std::to_string(u) + ".csv"), art.trajectory->to_csv(cols));
    }
  }

  const Stats before = mc.stat([](const TrialMetrics& t) { return t.coverage_before; });
  const Stats after = mc.stat([](const TrialMetrics& t) { return t.coverage_after; });
  const Stats count = mc.stat([](const TrialMetrics& t) { return static_cast<double>(t.abs_count); });
  std::cout << to_string(c.method) << '/' << to_string(c.mode) << ": " << mc.trials.size() << " trials, median coverage "
            << before.median << " -> " << after.median << ", median ABS count " << count.median << "\n"
            << "outputs written to " << out.string() << "\n";
  return 0;
}

int run_bounds(const std::string& path) {
  const ScenarioConfig c = ScenarioConfig::load(path);
  const double r1 = c.r1();
  const double r2 = c.r2();
  const FleetBounds b = abs_count_bounds(c.region, r1, r2);
  std::cout << "R1 = " << r1 << " m\nR2 = " << r2 << " m\n"
            << "single: lower " << b.single.lower << ", upper " << b.single.upper << "\n"
            << "swarm:  lower " << b.swarm.lower << ", upper " << b.swarm.upper << "\n"
            << "ABS count range: [" << b.min << ", " << b.max << "]\n";
  return 0;
}

int run_study_order(const std::string& path, const std::string& out_path, std::uint64_t seed, bool seed_set) {
  ScenarioConfig c = ScenarioConfig::load(path);
  if (seed_set) c.seed = seed;
  const Scene scene = build_scenario(c, trial_seed(c.seed, 0));
  const std::vector<StartPolicy> policies{StartPolicy::LeftMost, StartPolicy::RightMost, StartPolicy::TopMost,
                                          StartPolicy::BottomMost, StartPolicy::Random};
  const std::string csv = order_study_csv(visiting_order_study(scene, c, policies));
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return 0;
}

int run_swarm_case(std::uint64_t seed, double duration, const std::string& out_path) {
  const CaseStudy cs = make_case_study(seed);
  SimOptions so;
  so.duration = duration;
  so.impulses = {{500.0, {5.0, 10.0, -3.0}, -1}};
  const TrajectoryLog log = simulate(cs.agents, ControlParams{}, so);
  write_file(out_path, log.to_csv());
  std::cout << "settled at t = " << log.settle_time(0.5, 0.05, 0.0, 400.0) << " s, min separation "
            << *std::min_element(log.min_distance.begin(), log.min_distance.end()) << " m\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV coverage-hole detection and recovery simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo detection and recovery runs");
  simulate_cmd->add_option("--config", sim.config, "scenario JSON")->required();
  simulate_cmd->add_option("--method", sim.method, "proposed | bsl | grid");
  simulate_cmd->add_option("--mode", sim.mode, "offline | online");
  simulate_cmd->add_option("--start-policy", sim.start_policy, "left-most | right-most | top-most | bottom-most | random");
  simulate_cmd->add_option("--trials", sim.trials, "number of trials")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "master seed");
  simulate_cmd->add_option("--beta", sim.beta, "tour-length constant");
  simulate_cmd->add_flag("--fly", sim.fly, "fly the scheduled units with the swarm controller");
  simulate_cmd->add_option("--out", sim.out, "output directory");
  simulate_cmd->add_option("--workers", sim.workers, "worker threads (default: hardware concurrency)");

  std::string bounds_config;
  auto* bounds_cmd = app.add_subcommand("bounds", "coverage radii and ABS count range");
  bounds_cmd->add_option("--config", bounds_config, "scenario JSON")->required();

  std::string order_config;
  std::string order_out;
  std::uint64_t order_seed = 0;
  auto* order_cmd = app.add_subcommand("study-order", "compare patrol start policies on one scene");
  order_cmd->add_option("--config", order_config, "scenario JSON")->required();
  order_cmd->add_option("--seed", order_seed, "master seed");
  order_cmd->add_option("--out", order_out, "CSV output file (default: stdout)");

  std::uint64_t case_seed = 1;
  double case_duration = 600.0;
  std::string case_out = "trajectory.csv";
  auto* case_cmd = app.add_subcommand("swarm-case", "five-swarm formation flight with a velocity impulse at t = 500 s");
  case_cmd->add_option("--seed", case_seed, "takeoff placement seed");
  case_cmd->add_option("--duration", case_duration, "simulated seconds");
  case_cmd->add_option("--out", case_out, "trajectory CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate_cmd) return run_simulate(sim, *simulate_cmd);
    if (*bounds_cmd) return run_bounds(bounds_config);
    if (*order_cmd) return run_study_order(order_config, order_out, order_seed, order_cmd->count("--seed") > 0);
    if (*case_cmd) return run_swarm_case(case_seed, case_duration, case_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFault;
  }
  return 0;
}
