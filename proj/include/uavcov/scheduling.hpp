#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uavcov/detection.hpp"
#include "uavcov/geometry.hpp"

namespace uavcov {

enum class UnitKind { Config1, Config2 };
enum class Action { NoAction, DeployConfig1, DeployConfig2 };
enum class ScheduleMode { Offline, Online };
enum class HoleSize { Small, Big };

std::string to_string(UnitKind k);
std::string to_string(Action a);
std::string to_string(ScheduleMode m);
ScheduleMode parse_schedule_mode(const std::string& name);

struct Altitudes {
  double single = 150.0;  // Config 1 hover altitude
  double apex = 300.0;    // h_a
  double base = 150.0;    // h_b

  void validate() const;
};

struct DeploymentUnit {
  UnitKind kind = UnitKind::Config1;
  Vec2 anchor{};
  std::vector<Vec3> positions;  // 1 (Config 1) or 4 (Config 2)
  double h_a = 0.0;
  double h_b = 0.0;
  std::vector<int> targets;         // red checkpoint ids this unit serves
  std::size_t decision_index = 0;   // labels consumed when dispatched (online), 0 offline
};

struct ScheduleDecision {
  std::vector<Label> window;
  Action action = Action::NoAction;
  std::vector<std::size_t> target;  // window slots that are red and in the target zone
};

// Window rule for any length L >= 2. The target zone is the first L-1 slots.
// Config 2 when a red-red adjacent pair starts inside the target zone,
// Config 1 when the zone holds any other red, otherwise nothing.
ScheduleDecision window_policy(std::span<const Label> window);
ScheduleDecision window_policy(Label l1, Label l2, Label l3);

struct HoleTag {
  int id = 0;
  std::size_t step = 0;
  HoleSize size = HoleSize::Small;
};

// Per red checkpoint, in visit order.
std::vector<HoleTag> classify_hole_offline(const CheckpointGraph& graph);

std::array<Vec3, 4> tetrahedron_offsets(double h_a, double h_b);

DeploymentUnit make_config1(Vec2 anchor, double altitude);
DeploymentUnit make_config2(Vec2 anchor, double h_a, double h_b);

// `run_spacing` (normally 2·R2) splits long red runs; <= 0 keeps one swarm per run.
std::vector<DeploymentUnit> schedule_offline(const CheckpointGraph& graph, const Altitudes& alt,
                                             double run_spacing = 0.0);

struct OnlineOptions {
  std::size_t window = 3;
  double r1 = 0.0;  // dedup disk for Config 1 units
  double r2 = 0.0;  // dedup disk for Config 2 units
  bool flush = true;  // evaluate a final window padded with one blue label
};

std::vector<DeploymentUnit> schedule_online(std::span<const LabelEvent> stream, const Altitudes& alt,
                                            const OnlineOptions& opts = {});

struct FleetBounds {
  long min = 0;
  long max = 0;
  CoveringBounds single;
  CoveringBounds swarm;
};

FleetBounds abs_count_bounds(const Region& region, double r1, double r2);

struct DelayParams {
  double beta = 0.7124;
  double speed = 20.0;      // m/s
  double side = 1000.0;     // m
  double lambda_cp = 0.0;   // 1/m^2

  void validate() const;
};

double expected_discovery_time(const DelayParams& p);
double expected_completion(const DelayParams& p, double mean_r, ScheduleMode mode);

std::string deployment_to_json(std::span<const DeploymentUnit> units);

}  // namespace uavcov
