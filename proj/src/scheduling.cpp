#include "uavcov/scheduling.hpp"

#include <cmath>

#include <json.hpp>

namespace uavcov {

std::string to_string(UnitKind k) { return k == UnitKind::Config1 ? "config1" : "config2"; }

std::string to_string(Action a) {
  switch (a) {
    case Action::DeployConfig1:
      return "config1";
    case Action::DeployConfig2:
      return "config2";
    default:
      return "none";
  }
}

std::string to_string(ScheduleMode m) { return m == ScheduleMode::Offline ? "offline" : "online"; }

ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "offline") return ScheduleMode::Offline;
  if (name == "online") return ScheduleMode::Online;
  throw InvalidParameter("unknown schedule mode '" + name + "'");
}

void Altitudes::validate() const {
  if (!(single > 0.0)) throw InvalidParameter("single-ABS altitude must be positive");
  if (!(base > 0.0)) throw InvalidParameter("swarm base altitude must be positive");
  if (!(apex > base)) throw InvalidParameter("swarm apex altitude must exceed base altitude");
}

ScheduleDecision window_policy(std::span<const Label> window) {
  const std::size_t n = window.size();
  if (n < 2) throw InvalidParameter("window length must be at least 2");
  ScheduleDecision d;
  d.window.assign(window.begin(), window.end());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (window[k] == Label::Unvisited) throw PreconditionViolation("window holds an unvisited label");
    if (window[k] == Label::Red) d.target.push_back(k);
  }
  bool pair = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (window[k] == Label::Red && window[k + 1] == Label::Red) pair = true;
  }
  if (pair) {
    d.action = Action::DeployConfig2;
  } else if (!d.target.empty()) {
    d.action = Action::DeployConfig1;
  }
  return d;
}

ScheduleDecision window_policy(Label l1, Label l2, Label l3) {
  const std::array<Label, 3> w{l1, l2, l3};
  return window_policy(std::span<const Label>(w));
}

std::vector<HoleTag> classify_hole_offline(const CheckpointGraph& graph) {
  if (!graph.fully_labeled()) throw PreconditionViolation("classification needs a fully labeled graph");
  std::vector<HoleTag> out;
  const std::size_t n = graph.visit_order.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (graph.at_step(k).label != Label::Red) continue;
    const bool prev = k > 0 && graph.at_step(k - 1).label == Label::Red;
    const bool next = k + 1 < n && graph.at_step(k + 1).label == Label::Red;
    out.push_back({graph.visit_order[k], k, (prev || next) ? HoleSize::Big : HoleSize::Small});
  }
  return out;
}

std::array<Vec3, 4> tetrahedron_offsets(double h_a, double h_b) {
  if (!(h_a > h_b)) throw InvalidParameter("tetrahedron needs h_a > h_b");
  const double h = h_a - h_b;
  const double circ = h / std::sqrt(2.0);  // edge / sqrt(3)
  std::array<Vec3, 4> off{};
  off[0] = {0.0, 0.0, 0.75 * h};
  for (int k = 0; k < 3; ++k) {
    const double t = kPi / 2.0 + k * 2.0 * kPi / 3.0;
    off[k + 1] = {circ * std::cos(t), circ * std::sin(t), -0.25 * h};
  }
  return off;
}

DeploymentUnit make_config1(Vec2 anchor, double altitude) {
  DeploymentUnit u;
  u.kind = UnitKind::Config1;
  u.anchor = anchor;
  u.positions = {lift(anchor, altitude)};
  return u;
}

DeploymentUnit make_config2(Vec2 anchor, double h_a, double h_b) {
  DeploymentUnit u;
  u.kind = UnitKind::Config2;
  u.anchor = anchor;
  u.h_a = h_a;
  u.h_b = h_b;
  const Vec3 centroid = lift(anchor, h_b + 0.25 * (h_a - h_b));
  for (const Vec3& o : tetrahedron_offsets(h_a, h_b)) u.positions.push_back(centroid + o);
  return u;
}

std::vector<DeploymentUnit> schedule_offline(const CheckpointGraph& graph, const Altitudes& alt,
                                             double run_spacing) {
  alt.validate();
  const auto tags = classify_hole_offline(graph);
  std::vector<DeploymentUnit> units;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i].size == HoleSize::Small) {
      DeploymentUnit u = make_config1(graph.checkpoints[tags[i].id].position, alt.single);
      u.targets = {tags[i].id};
      units.push_back(std::move(u));
      ++i;
      continue;
    }
    // Maximal run of consecutive reds along the route.
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j].step == tags[j - 1].step + 1) ++j;
    DeploymentUnit cur = make_config2(graph.checkpoints[tags[i].id].position, alt.apex, alt.base);
    cur.targets = {tags[i].id};
    for (std::size_t k = i + 1; k < j; ++k) {
      const Vec2 p = graph.checkpoints[tags[k].id].position;
      if (run_spacing > 0.0 && distance(p, cur.anchor) >= run_spacing) {
        units.push_back(std::move(cur));
        cur = make_config2(p, alt.apex, alt.base);
        cur.targets.clear();
      }
      cur.targets.push_back(tags[k].id);
    }
    units.push_back(std::move(cur));
    i = j;
  }
  return units;
}

namespace {

bool already_served(const std::vector<DeploymentUnit>& units, int id, Vec2 p, const OnlineOptions& o) {
  for (const DeploymentUnit& u : units) {
    for (int t : u.targets) {
      if (t == id) return true;
    }
    const double r = u.kind == UnitKind::Config1 ? o.r1 : o.r2;
    if (r > 0.0 && distance(u.anchor, p) <= r) return true;
  }
  return false;
}

}  // namespace

std::vector<DeploymentUnit> schedule_online(std::span<const LabelEvent> stream, const Altitudes& alt,
                                            const OnlineOptions& opts) {
  alt.validate();
  const std::size_t L = opts.window;
  if (L < 2) throw InvalidParameter("window length must be at least 2");
  std::vector<DeploymentUnit> units;
  const std::size_t n = stream.size();
  if (n < L) return units;

  std::vector<Label> window(L);
  auto evaluate = [&](std::size_t first, std::size_t consumed, bool padded) {
    for (std::size_t k = 0; k < L; ++k) {
      const bool pad = padded && k + 1 == L;
      window[k] = pad ? Label::Blue : stream[first + k].label;
    }
    const ScheduleDecision d = window_policy(std::span<const Label>(window));
    if (d.action == Action::NoAction) return;
    std::vector<const LabelEvent*> open;
    for (std::size_t slot : d.target) {
      const LabelEvent& ev = stream[first + slot];
      if (!already_served(units, ev.id, ev.position, opts)) open.push_back(&ev);
    }
    if (open.empty()) return;
    Vec2 mid{};
    for (const LabelEvent* ev : open) mid = mid + ev->position;
    mid = mid * (1.0 / static_cast<double>(open.size()));
    DeploymentUnit u = d.action == Action::DeployConfig1 ? make_config1(mid, alt.single)
                                                         : make_config2(mid, alt.apex, alt.base);
    for (const LabelEvent* ev : open) u.targets.push_back(ev->id);
    u.decision_index = consumed;
    units.push_back(std::move(u));
  };

  for (std::size_t end = L; end <= n; ++end) evaluate(end - L, end, false);
  // Trailing window so the last checkpoints also enter a target zone.
  if (opts.flush) evaluate(n - L + 1, n, true);
  return units;
}

FleetBounds abs_count_bounds(const Region& region, double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw InvalidParameter("coverage radii must be positive");
  FleetBounds b;
  b.single = covering_bounds(region, r1);
  b.swarm = covering_bounds(region, r2);
  b.min = std::min(b.single.lower_int, 4 * b.swarm.lower_int);
  b.max = std::max(b.single.upper_int, 4 * b.swarm.upper_int);
  return b;
}

void DelayParams::validate() const {
  if (!(beta > 0.0)) throw InvalidParameter("beta must be positive");
  if (!(speed > 0.0)) throw InvalidParameter("speed must be positive");
  if (!(side > 0.0)) throw InvalidParameter("side length must be positive");
  if (!(lambda_cp >= 0.0)) throw InvalidParameter("checkpoint intensity must be non-negative");
}

double expected_discovery_time(const DelayParams& p) {
  p.validate();
  return p.beta * p.side * p.side * std::sqrt(p.lambda_cp) / p.speed;
}

double expected_completion(const DelayParams& p, double mean_r, ScheduleMode mode) {
  const double t_cp = expected_discovery_time(p);
  const double travel = mean_r / p.speed;
  return mode == ScheduleMode::Offline ? t_cp + travel : 0.5 * t_cp + travel;
}

std::string deployment_to_json(std::span<const DeploymentUnit> units) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const DeploymentUnit& u : units) {
    nlohmann::ordered_json pos = nlohmann::ordered_json::array();
    for (const Vec3& p : u.positions) pos.push_back({p.x, p.y, p.z});
    nlohmann::ordered_json j;
    j["kind"] = to_string(u.kind);
    j["anchor"] = {u.anchor.x, u.anchor.y};
    j["positions"] = pos;
    if (u.kind == UnitKind::Config2) {
      j["h_a"] = u.h_a;
      j["h_b"] = u.h_b;
    }
    j["targets"] = u.targets;
    j["decision_index"] = u.decision_index;
    arr.push_back(j);
  }
  nlohmann::ordered_json root;
  root["units"] = arr;
  return root.dump(2);
}

}  // namespace uavcov
