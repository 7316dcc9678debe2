#include "uavcov/detection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace uavcov {

char label_char(Label l) {
  switch (l) {
    case Label::Red:
      return 'R';
    case Label::Blue:
      return 'B';
    default:
      return '?';
  }
}

bool CheckpointGraph::fully_labeled() const {
  return std::all_of(checkpoints.begin(), checkpoints.end(),
                     [](const Checkpoint& c) { return c.label != Label::Unvisited; });
}

std::string CheckpointGraph::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cps = nlohmann::ordered_json::array();
  for (const Checkpoint& c : checkpoints) {
    std::string lab = c.label == Label::Red ? "red" : (c.label == Label::Blue ? "blue" : "unvisited");
    cps.push_back({{"id", c.id}, {"x", c.position.x}, {"y", c.position.y}, {"label", lab}});
  }
  j["checkpoints"] = cps;
  j["visit_order"] = visit_order;
  j["path_length"] = path_length;
  return j.dump(2);
}

CheckpointGraph CheckpointGraph::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CheckpointGraph g;
  for (const auto& c : j.at("checkpoints")) {
    Checkpoint cp;
    cp.id = c.at("id").get<int>();
    cp.position = {c.at("x").get<double>(), c.at("y").get<double>()};
    const std::string lab = c.at("label").get<std::string>();
    cp.label = lab == "red" ? Label::Red : (lab == "blue" ? Label::Blue : Label::Unvisited);
    g.checkpoints.push_back(cp);
  }
  g.visit_order = j.at("visit_order").get<std::vector<int>>();
  g.path_length = j.at("path_length").get<double>();
  return g;
}

StartPolicy parse_start_policy(const std::string& name) {
  if (name == "left-most") return StartPolicy::LeftMost;
  if (name == "right-most") return StartPolicy::RightMost;
  if (name == "top-most") return StartPolicy::TopMost;
  if (name == "bottom-most") return StartPolicy::BottomMost;
  if (name == "random") return StartPolicy::Random;
  throw InvalidParameter("unknown start policy '" + name + "'");
}

std::string to_string(StartPolicy p) {
  switch (p) {
    case StartPolicy::LeftMost:
      return "left-most";
    case StartPolicy::RightMost:
      return "right-most";
    case StartPolicy::TopMost:
      return "top-most";
    case StartPolicy::BottomMost:
      return "bottom-most";
    case StartPolicy::Random:
      return "random";
    case StartPolicy::Fixed:
      return "fixed";
  }
  return "unknown";
}

std::vector<Checkpoint> make_checkpoints(std::span<const Vec2> positions) {
  std::vector<Checkpoint> out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.push_back({static_cast<int>(i), positions[i], Label::Unvisited});
  }
  return out;
}

std::vector<Checkpoint> generate_checkpoints(const Region& region, double density,
                                             double exclusion_radius, std::uint64_t seed) {
  if (!(exclusion_radius > 0.0)) throw InvalidParameter("checkpoint exclusion radius must be positive");
  const PointSet raw = sample_ppp(region, density, seed);
  const PointSet kept = matern_thin(raw, exclusion_radius);
  return make_checkpoints(kept.points);
}

int resolve_start(const std::vector<Checkpoint>& checkpoints, const StartSpec& start) {
  if (checkpoints.empty()) throw InvalidParameter("no checkpoints to start from");
  auto pick = [&](auto better) {
    int best = 0;
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
      if (better(checkpoints[i].position, checkpoints[best].position)) best = static_cast<int>(i);
    }
    return best;
  };
  switch (start.policy) {
    case StartPolicy::LeftMost:
      return pick([](Vec2 a, Vec2 b) { return a.x < b.x; });
    case StartPolicy::RightMost:
      return pick([](Vec2 a, Vec2 b) { return a.x > b.x; });
    case StartPolicy::TopMost:
      return pick([](Vec2 a, Vec2 b) { return a.y > b.y; });
    case StartPolicy::BottomMost:
      return pick([](Vec2 a, Vec2 b) { return a.y < b.y; });
    case StartPolicy::Random: {
      Rng rng(start.seed);
      std::uniform_int_distribution<int> u(0, static_cast<int>(checkpoints.size()) - 1);
      return u(rng);
    }
    case StartPolicy::Fixed:
      if (start.fixed_id < 0 || start.fixed_id >= static_cast<int>(checkpoints.size())) {
        throw InvalidParameter("start checkpoint id out of range");
      }
      return start.fixed_id;
  }
  return 0;
}

double route_length(const std::vector<Checkpoint>& checkpoints, std::span<const int> order) {
  double len = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    len += distance(checkpoints[order[k - 1]].position, checkpoints[order[k]].position);
  }
  return len;
}

namespace {

std::vector<int> greedy_order(const std::vector<Checkpoint>& cps, int start) {
  const std::size_t n = cps.size();
  std::vector<bool> seen(n, false);
  std::vector<int> order{start};
  seen[start] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const Vec2 here = cps[order.back()].position;
    int next = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (seen[j]) continue;
      const double d = distance(here, cps[j].position);
      if (d < best) {  // strict: lowest id wins ties
        best = d;
        next = static_cast<int>(j);
      }
    }
    seen[next] = true;
    order.push_back(next);
  }
  return order;
}

// Segment-reversal improvement for an open path with a fixed first node.
void two_opt(const std::vector<Checkpoint>& cps, std::vector<int>& order) {
  const std::size_t n = order.size();
  if (n < 4) return;
  auto d = [&](int a, int b) { return distance(cps[a].position, cps[b].position); };
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (std::size_t k = i + 1; k < n; ++k) {
        const double before = d(order[i - 1], order[i]) + (k + 1 < n ? d(order[k], order[k + 1]) : 0.0);
        const double after = d(order[i - 1], order[k]) + (k + 1 < n ? d(order[i], order[k + 1]) : 0.0);
        if (after < before - 1e-9) {
          std::reverse(order.begin() + static_cast<long>(i), order.begin() + static_cast<long>(k) + 1);
          improved = true;
        }
      }
    }
  }
}

// Held-Karp over open paths from a fixed start.
std::vector<int> exact_order(const std::vector<Checkpoint>& cps, int start) {
  const int n = static_cast<int>(cps.size());
  if (n > 16) throw InvalidParameter("exact path planning is limited to 16 checkpoints");
  const std::size_t full = std::size_t{1} << n;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(full * n, inf);
  std::vector<int> parent(full * n, -1);
  cost[(std::size_t{1} << start) * n + start] = 0.0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (!(mask & (std::size_t{1} << start))) continue;
    for (int last = 0; last < n; ++last) {
      const double c = cost[mask * n + last];
      if (c == inf) continue;
      for (int nxt = 0; nxt < n; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const std::size_t m2 = mask | (std::size_t{1} << nxt);
        const double c2 = c + distance(cps[last].position, cps[nxt].position);
        if (c2 < cost[m2 * n + nxt]) {
          cost[m2 * n + nxt] = c2;
          parent[m2 * n + nxt] = last;
        }
      }
    }
  }
  int last = 0;
  double best = inf;
  for (int j = 0; j < n; ++j) {
    if (cost[(full - 1) * n + j] < best) {
      best = cost[(full - 1) * n + j];
      last = j;
    }
  }
  std::vector<int> order;
  std::size_t mask = full - 1;
  while (last >= 0) {
    order.push_back(last);
    const int p = parent[mask * n + last];
    mask &= ~(std::size_t{1} << last);
    last = p;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

}  // namespace

CheckpointGraph plan_patrol_path(std::vector<Checkpoint> checkpoints, const StartSpec& start,
                                 PathPlanner planner) {
  if (checkpoints.empty()) throw InvalidParameter("patrol planning needs at least one checkpoint");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i].id != static_cast<int>(i)) throw InvalidParameter("checkpoint ids must be 0..n-1 in order");
  }
  CheckpointGraph g;
  const int s = resolve_start(checkpoints, start);
  g.checkpoints = std::move(checkpoints);
  switch (planner) {
    case PathPlanner::Greedy:
      g.visit_order = greedy_order(g.checkpoints, s);
      break;
    case PathPlanner::GreedyTwoOpt:
      g.visit_order = greedy_order(g.checkpoints, s);
      two_opt(g.checkpoints, g.visit_order);
      break;
    case PathPlanner::Exact:
      g.visit_order = exact_order(g.checkpoints, s);
      break;
  }
  g.path_length = route_length(g.checkpoints, g.visit_order);
  return g;
}

LabelResult label_checkpoints(const CheckpointGraph& graph, std::span<const Transmitter> stations,
                              const ChannelParams& params, double gamma_th, double patrol_height,
                              const FadingSpec& fading) {
  for (const Checkpoint& c : graph.checkpoints) {
    if (c.label != Label::Unvisited) throw PreconditionViolation("checkpoints are already labeled");
  }
  LabelResult out;
  out.graph = graph;
  out.stream.reserve(graph.visit_order.size());
  for (std::size_t k = 0; k < graph.visit_order.size(); ++k) {
    Checkpoint& cp = out.graph.checkpoints[graph.visit_order[k]];
    const Vec3 rx = lift(cp.position, patrol_height);
    const double s = stations.empty() ? 0.0
                                      : mean_sinr_c2a(rx, stations, params, fading,
                                                      static_cast<std::uint64_t>(cp.id));
    cp.label = s < gamma_th ? Label::Red : Label::Blue;
    out.stream.push_back({k, cp.id, cp.position, cp.label, s});
  }
  return out;
}

}  // namespace uavcov
