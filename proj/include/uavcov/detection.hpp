#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavcov/channel.hpp"
#include "uavcov/geometry.hpp"

namespace uavcov {

enum class Label { Unvisited, Red, Blue };

char label_char(Label l);

struct Checkpoint {
  int id = 0;
  Vec2 position{};
  Label label = Label::Unvisited;
};

// Patrol route over the checkpoints (the directed checkpoint graph).
struct CheckpointGraph {
  std::vector<Checkpoint> checkpoints;  // indexed by id
  std::vector<int> visit_order;         // permutation of ids
  double path_length = 0.0;

  const Checkpoint& at_step(std::size_t k) const { return checkpoints[visit_order[k]]; }
  bool fully_labeled() const;
  std::string to_json() const;
  static CheckpointGraph from_json(const std::string& text);
};

enum class StartPolicy { LeftMost, RightMost, TopMost, BottomMost, Random, Fixed };

struct StartSpec {
  StartPolicy policy = StartPolicy::LeftMost;
  int fixed_id = 0;           // Fixed
  std::uint64_t seed = 0;     // Random
};

StartPolicy parse_start_policy(const std::string& name);
std::string to_string(StartPolicy p);

enum class PathPlanner { Greedy, GreedyTwoOpt, Exact };

std::vector<Checkpoint> generate_checkpoints(const Region& region, double density,
                                             double exclusion_radius, std::uint64_t seed);

// Checkpoints from explicit positions (ids follow input order).
std::vector<Checkpoint> make_checkpoints(std::span<const Vec2> positions);

int resolve_start(const std::vector<Checkpoint>& checkpoints, const StartSpec& start);

CheckpointGraph plan_patrol_path(std::vector<Checkpoint> checkpoints, const StartSpec& start,
                                 PathPlanner planner = PathPlanner::Greedy);

double route_length(const std::vector<Checkpoint>& checkpoints, std::span<const int> order);

// One patrol observation in visit order.
struct LabelEvent {
  std::size_t step = 0;  // position along the route
  int id = 0;
  Vec2 position{};
  Label label = Label::Unvisited;
  double sinr = 0.0;
};

struct LabelResult {
  CheckpointGraph graph;
  std::vector<LabelEvent> stream;
};

LabelResult label_checkpoints(const CheckpointGraph& graph, std::span<const Transmitter> stations,
                              const ChannelParams& params, double gamma_th, double patrol_height,
                              const FadingSpec& fading = {});

}  // namespace uavcov
