#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uavcov/channel.hpp"
#include "uavcov/detection.hpp"
#include "uavcov/geometry.hpp"
#include "uavcov/scheduling.hpp"
#include "uavcov/swarm.hpp"

namespace uavcov {

enum class Method { Proposed, Bsl, Grid };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct ChannelConfig {
  double m = 3.0;
  double omega = 1.0;
  double alpha_b = 2.2;
  double alpha_al = 2.0;
  double alpha_an = 2.5;
  double env_a = kPi / 18.0;
  double env_b = 0.11;
  double noise_dbm = -97.0;
  double ref_gain_db = -85.0;
  double ref_gain_a2g_db = -74.0;
  double interference_factor = 0.001;
};

struct ScenarioConfig {
  Region region{500.0, 500.0, {0.0, 0.0}};
  double bs_density_km2 = 100.0;
  double bs_height = 30.0;
  double bs_tx_dbm = 43.0;
  double active_fraction = 1.0;  // share of BSs left operational
  double abs_tx_dbm = 37.0;
  ChannelConfig channel;
  double gamma_th_db = 11.3;
  double cp_density_km2 = 50.0;
  double exclusion_radius = 50.0;
  double patrol_height = 25.0;
  double ue_height = 25.0;
  Altitudes altitudes;
  ControlParams control;
  double resolution = 10.0;
  int trials = 100;
  std::uint64_t seed = 1;
  Method method = Method::Proposed;
  ScheduleMode mode = ScheduleMode::Online;
  std::size_t window = 3;
  StartPolicy start_policy = StartPolicy::LeftMost;
  PathPlanner planner = PathPlanner::Greedy;
  int grid_size = 7;
  double beta = 0.7124;
  double speed = 20.0;
  FadingMode fading = FadingMode::Mean;
  int fading_draws = 100;
  bool split_runs = true;
  bool dedup_disk = true;  // online: also suppress reds inside an issued unit's disk
  bool fly = false;
  double fly_horizon = 600.0;

  // Parses JSON; missing keys keep defaults, unknown keys are rejected.
  static ScenarioConfig from_json(const std::string& text);
  static ScenarioConfig load(const std::string& path);
  std::string to_json() const;
  void validate() const;

  ChannelParams channel_params() const;
  double gamma_linear() const;
  double r1() const;
  double r2() const;
};

struct Scene {
  std::uint64_t seed = 0;
  Region region;
  std::vector<Transmitter> stations;  // every site, failed or not
  std::vector<bool> active;

  std::vector<Transmitter> active_stations() const;
  std::size_t active_count() const;
  std::string to_json() const;
};

Scene build_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct TrialMetrics {
  std::uint64_t seed = 0;
  double coverage_before = 0.0;
  double coverage_after = 0.0;
  long abs_count = 0;  // aerial stations, four per swarm
  long config1_units = 0;
  long config2_units = 0;
  double per_abs_improvement = 0.0;  // m^2
  std::size_t checkpoints = 0;
  std::size_t red_checkpoints = 0;
  double path_length = 0.0;
  std::vector<int> red_ids;  // sorted
  std::vector<double> completion_times;
  std::vector<double> base_distances;
  std::vector<std::vector<int>> small_groups;
  std::vector<std::vector<int>> big_groups;
  double flight_settle_time = -1.0;  // --fly only
  double min_separation = -1.0;      // --fly only

  double improvement() const { return coverage_after - coverage_before; }
  double mean_completion() const;
  double mean_base_distance() const;
};

struct TrialArtifacts {
  CheckpointGraph graph;
  std::vector<LabelEvent> stream;
  std::vector<DeploymentUnit> units;
  CoverageMap before;
  CoverageMap after;
  std::optional<TrajectoryLog> trajectory;
};

// Full pipeline on caller-supplied checkpoints.
TrialMetrics run_pipeline(const Scene& scene, const ScenarioConfig& config,
                          std::vector<Checkpoint> checkpoints, std::optional<std::vector<int>> fixed_order = {},
                          TrialArtifacts* artifacts = nullptr);

TrialMetrics run_trial(const Scene& scene, const ScenarioConfig& config, TrialArtifacts* artifacts = nullptr);
TrialMetrics run_baseline_bsl(const Scene& scene, const ScenarioConfig& config,
                              TrialArtifacts* artifacts = nullptr);
TrialMetrics run_baseline_grid(const Scene& scene, const ScenarioConfig& config,
                               TrialArtifacts* artifacts = nullptr);

// Cell-centre checkpoints and their serpentine order starting at the top row.
std::pair<std::vector<Checkpoint>, std::vector<int>> grid_checkpoints(const Region& region, int g);

TrialMetrics run_method(const Scene& scene, const ScenarioConfig& config, TrialArtifacts* artifacts = nullptr);

struct Stats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

Stats describe(std::vector<double> values);

struct MonteCarloResult {
  std::vector<TrialMetrics> trials;  // in trial-index order

  Stats stat(double (*metric)(const TrialMetrics&)) const;
  std::string metrics_csv() const;
  std::string summary_json(const ScenarioConfig& config) const;
};

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

MonteCarloResult monte_carlo(const ScenarioConfig& config, unsigned workers = 1);

struct OrderStudyRow {
  StartPolicy policy;
  int start_id = 0;
  TrialMetrics metrics;
};

std::vector<OrderStudyRow> visiting_order_study(const Scene& scene, const ScenarioConfig& config,
                                                const std::vector<StartPolicy>& policies);

std::string order_study_csv(const std::vector<OrderStudyRow>& rows);

}  // namespace uavcov
