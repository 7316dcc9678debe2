#include "uavcov/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace uavcov {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::Proposed:
      return "proposed";
    case Method::Bsl:
      return "bsl";
    case Method::Grid:
      return "grid";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "proposed") return Method::Proposed;
  if (name == "bsl") return Method::Bsl;
  if (name == "grid") return Method::Grid;
  throw ConfigError("unknown method '" + name + "'");
}

namespace {

// Reads one JSON object, tracking consumed keys so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + label() + "' must be an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("field '" + path_ + key + "' has the wrong type");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key '" + path_ + k + "'");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_.substr(0, path_.size() - 1); }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void with_field(const std::string& name, F&& check) {
  try {
    check();
  } catch (const InvalidParameter& e) {
    throw ConfigError("field '" + name + "': " + e.what());
  }
}

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError("field '" + field + "': " + msg);
}

PathPlanner parse_planner(const std::string& s) {
  if (s == "greedy") return PathPlanner::Greedy;
  if (s == "greedy-2opt") return PathPlanner::GreedyTwoOpt;
  if (s == "exact") return PathPlanner::Exact;
  throw ConfigError("field 'planner': unknown planner '" + s + "'");
}

std::string planner_name(PathPlanner p) {
  switch (p) {
    case PathPlanner::Greedy:
      return "greedy";
    case PathPlanner::GreedyTwoOpt:
      return "greedy-2opt";
    case PathPlanner::Exact:
      return "exact";
  }
  return "greedy";
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig c;
  ObjectReader r(root, "");
  if (r.has("region")) {
    ObjectReader rr(r.child("region"), "region.");
    rr.get("width", c.region.width);
    rr.get("height", c.region.height);
    rr.get("origin_x", c.region.origin.x);
    rr.get("origin_y", c.region.origin.y);
    rr.finish();
  }
  r.get("bs_density_km2", c.bs_density_km2);
  r.get("bs_height", c.bs_height);
  r.get("bs_tx_dbm", c.bs_tx_dbm);
  r.get("active_fraction", c.active_fraction);
  r.get("abs_tx_dbm", c.abs_tx_dbm);
  if (r.has("channel")) {
    ObjectReader ch(r.child("channel"), "channel.");
    ch.get("m", c.channel.m);
    ch.get("omega", c.channel.omega);
    ch.get("alpha_b", c.channel.alpha_b);
    ch.get("alpha_al", c.channel.alpha_al);
    ch.get("alpha_an", c.channel.alpha_an);
    ch.get("env_a", c.channel.env_a);
    ch.get("env_b", c.channel.env_b);
    ch.get("noise_dbm", c.channel.noise_dbm);
    ch.get("ref_gain_db", c.channel.ref_gain_db);
    ch.get("ref_gain_a2g_db", c.channel.ref_gain_a2g_db);
    ch.get("interference_factor", c.channel.interference_factor);
    ch.finish();
  }
  r.get("gamma_th_db", c.gamma_th_db);
  r.get("cp_density_km2", c.cp_density_km2);
  r.get("exclusion_radius", c.exclusion_radius);
  r.get("patrol_height", c.patrol_height);
  r.get("ue_height", c.ue_height);
  if (r.has("altitudes")) {
    ObjectReader al(r.child("altitudes"), "altitudes.");
    al.get("single", c.altitudes.single);
    al.get("apex", c.altitudes.apex);
    al.get("base", c.altitudes.base);
    al.finish();
  }
  if (r.has("control")) {
    ObjectReader co(r.child("control"), "control.");
    co.get("b", c.control.b);
    co.get("c", c.control.c);
    co.get("eps", c.control.eps);
    co.get("k1", c.control.k1);
    co.get("k2", c.control.k2);
    co.get("r_c", c.control.r_c);
    co.get("r_d", c.control.r_d);
    co.get("v_max", c.control.v_max);
    co.get("adjacency", c.control.adjacency);
    co.finish();
  }
  r.get("resolution", c.resolution);
  r.get("trials", c.trials);
  r.get("seed", c.seed);
  std::string s;
  if (r.has("method")) {
    r.get("method", s);
    c.method = parse_method(s);
  }
  if (r.has("mode")) {
    r.get("mode", s);
    try {
      c.mode = parse_schedule_mode(s);
    } catch (const InvalidParameter& e) {
      throw ConfigError(std::string("field 'mode': ") + e.what());
    }
  }
  r.get("window", c.window);
  if (r.has("start_policy")) {
    r.get("start_policy", s);
    with_field("start_policy", [&] { c.start_policy = parse_start_policy(s); });
  }
  if (r.has("planner")) {
    r.get("planner", s);
    c.planner = parse_planner(s);
  }
  r.get("grid_size", c.grid_size);
  r.get("beta", c.beta);
  r.get("speed", c.speed);
  if (r.has("fading")) {
    r.get("fading", s);
    if (s == "mean") {
      c.fading = FadingMode::Mean;
    } else if (s == "sampled") {
      c.fading = FadingMode::Sampled;
    } else {
      throw ConfigError("field 'fading': expected 'mean' or 'sampled'");
    }
  }
  r.get("fading_draws", c.fading_draws);
  r.get("split_runs", c.split_runs);
  if (r.has("online_dedup")) {
    r.get("online_dedup", s);
    if (s == "disk") {
      c.dedup_disk = true;
    } else if (s == "index") {
      c.dedup_disk = false;
    } else {
      throw ConfigError("field 'online_dedup': expected 'disk' or 'index'");
    }
  }
  r.get("fly", c.fly);
  r.get("fly_horizon", c.fly_horizon);
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ScenarioConfig::to_json() const {
  nlohmann::ordered_json j;
  j["region"] = {{"width", region.width}, {"height", region.height}, {"origin_x", region.origin.x},
                 {"origin_y", region.origin.y}};
  j["bs_density_km2"] = bs_density_km2;
  j["bs_height"] = bs_height;
  j["bs_tx_dbm"] = bs_tx_dbm;
  j["active_fraction"] = active_fraction;
  j["abs_tx_dbm"] = abs_tx_dbm;
  j["channel"] = {{"m", channel.m},
                  {"omega", channel.omega},
                  {"alpha_b", channel.alpha_b},
                  {"alpha_al", channel.alpha_al},
                  {"alpha_an", channel.alpha_an},
                  {"env_a", channel.env_a},
                  {"env_b", channel.env_b},
                  {"noise_dbm", channel.noise_dbm},
                  {"ref_gain_db", channel.ref_gain_db},
                  {"ref_gain_a2g_db", channel.ref_gain_a2g_db},
                  {"interference_factor", channel.interference_factor}};
  j["gamma_th_db"] = gamma_th_db;
  j["cp_density_km2"] = cp_density_km2;
  j["exclusion_radius"] = exclusion_radius;
  j["patrol_height"] = patrol_height;
  j["ue_height"] = ue_height;
  j["altitudes"] = {{"single", altitudes.single}, {"apex", altitudes.apex}, {"base", altitudes.base}};
  j["control"] = {{"b", control.b},     {"c", control.c},     {"eps", control.eps},
                  {"k1", control.k1},   {"k2", control.k2},   {"r_c", control.r_c},
                  {"r_d", control.r_d}, {"v_max", control.v_max}, {"adjacency", control.adjacency}};
  j["resolution"] = resolution;
  j["trials"] = trials;
  j["seed"] = seed;
  j["method"] = to_string(method);
  j["mode"] = to_string(mode);
  j["window"] = window;
  j["start_policy"] = to_string(start_policy);
  j["planner"] = planner_name(planner);
  j["grid_size"] = grid_size;
  j["beta"] = beta;
  j["speed"] = speed;
  j["fading"] = fading == FadingMode::Mean ? "mean" : "sampled";
  j["fading_draws"] = fading_draws;
  j["split_runs"] = split_runs;
  j["online_dedup"] = dedup_disk ? "disk" : "index";
  j["fly"] = fly;
  j["fly_horizon"] = fly_horizon;
  return j.dump(2);
}

void ScenarioConfig::validate() const {
  require(region.width > 0.0, "region.width", "must be positive");
  require(region.height > 0.0, "region.height", "must be positive");
  require(bs_density_km2 >= 0.0, "bs_density_km2", "must be non-negative");
  require(bs_height > 0.0, "bs_height", "must be positive");
  require(active_fraction >= 0.0 && active_fraction <= 1.0, "active_fraction", "must lie in [0, 1]");
  require(channel.m >= 0.5, "channel.m", "Nakagami shape must be at least 0.5");
  require(channel.omega > 0.0, "channel.omega", "must be positive");
  require(channel.alpha_b > 2.0, "channel.alpha_b", "must exceed 2");
  require(channel.alpha_al > 0.0, "channel.alpha_al", "must be positive");
  require(channel.alpha_an > 0.0, "channel.alpha_an", "must be positive");
  require(channel.interference_factor >= 0.0 && channel.interference_factor <= 1.0,
          "channel.interference_factor", "must lie in [0, 1]");
  require(std::isfinite(gamma_th_db), "gamma_th_db", "must be finite");
  require(cp_density_km2 >= 0.0, "cp_density_km2", "must be non-negative");
  require(exclusion_radius > 0.0, "exclusion_radius", "must be positive");
  require(patrol_height > 0.0 && patrol_height <= 300.0, "patrol_height", "must lie in (0, 300] m");
  require(ue_height >= 0.0, "ue_height", "must be non-negative");
  require(altitudes.single > 0.0 && altitudes.single <= 300.0, "altitudes.single", "must lie in (0, 300] m");
  require(altitudes.apex <= 300.0, "altitudes.apex", "must not exceed 300 m");
  require(altitudes.base > 0.0 && altitudes.apex > altitudes.base, "altitudes", "need 0 < base < apex");
  with_field("control", [&] {
    try {
      control.validate();
    } catch (const InvalidTopology& e) {
      throw InvalidParameter(e.what());
    }
  });
  require(resolution > 0.0, "resolution", "must be positive");
  require(trials >= 1, "trials", "must be at least 1");
  require(window >= 2, "window", "must be at least 2");
  require(grid_size >= 1, "grid_size", "must be at least 1");
  require(beta > 0.0, "beta", "must be positive");
  require(speed > 0.0, "speed", "must be positive");
  require(fading_draws >= 1, "fading_draws", "must be at least 1");
  require(fly_horizon > 0.0, "fly_horizon", "must be positive");
  try {
    (void)r1();
  } catch (const InfeasibleAltitude& e) {
    throw ConfigError(std::string("field 'altitudes.single': ") + e.what());
  }
}

ChannelParams ScenarioConfig::channel_params() const {
  ChannelParams p;
  p.m = channel.m;
  p.omega = channel.omega;
  p.alpha_b = channel.alpha_b;
  p.alpha_al = channel.alpha_al;
  p.alpha_an = channel.alpha_an;
  p.env_a = channel.env_a;
  p.env_b = channel.env_b;
  p.noise_power = dbm_to_watts(channel.noise_dbm);
  p.ref_gain = db_to_linear(channel.ref_gain_db);
  p.ref_gain_a2g = db_to_linear(channel.ref_gain_a2g_db);
  p.interference_factor = channel.interference_factor;
  return p;
}

double ScenarioConfig::gamma_linear() const { return db_to_linear(gamma_th_db); }

double ScenarioConfig::r1() const {
  const ChannelParams p = channel_params();
  return coverage_radius_single(dbm_to_watts(abs_tx_dbm), gamma_linear(), p.noise_power, p.alpha_al,
                                altitudes.single, p.ref_gain_a2g);
}

double ScenarioConfig::r2() const { return coverage_radius_swarm(r1(), altitudes.apex, altitudes.base); }

std::vector<Transmitter> Scene::active_stations() const {
  std::vector<Transmitter> out;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (active[i]) out.push_back(stations[i]);
  }
  return out;
}

std::size_t Scene::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

std::string Scene::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["region"] = {{"width", region.width}, {"height", region.height}, {"origin_x", region.origin.x},
                 {"origin_y", region.origin.y}};
  nlohmann::ordered_json bs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const Transmitter& t = stations[i];
    bs.push_back({{"x", t.position.x}, {"y", t.position.y}, {"z", t.position.z}, {"tx_power_w", t.tx_power},
                  {"active", static_cast<bool>(active[i])}});
  }
  j["stations"] = bs;
  return j.dump(2);
}

Scene build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Scene s;
  s.seed = seed;
  s.region = config.region;
  const PointSet sites = sample_ppp(config.region, config.bs_density_km2 * 1e-6, mix_seed(seed, 1));
  const double p = dbm_to_watts(config.bs_tx_dbm);
  for (const Vec2& q : sites.points) {
    s.stations.push_back({lift(q, config.bs_height), p, TransmitterKind::Terrestrial});
  }
  const std::size_t n = s.stations.size();
  s.active.assign(n, true);
  if (config.active_fraction < 1.0 && n > 0) {
    const auto keep = static_cast<std::size_t>(std::llround(config.active_fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(mix_seed(seed, 2));
    // Partial Fisher-Yates: the first `keep` entries are a uniform sample.
    for (std::size_t i = 0; i < keep; ++i) {
      std::uniform_int_distribution<std::size_t> u(i, n - 1);
      std::swap(idx[i], idx[u(rng)]);
    }
    s.active.assign(n, false);
    for (std::size_t i = 0; i < keep; ++i) s.active[idx[i]] = true;
  }
  return s;
}

double TrialMetrics::mean_completion() const {
  if (completion_times.empty()) return 0.0;
  return std::accumulate(completion_times.begin(), completion_times.end(), 0.0) /
         static_cast<double>(completion_times.size());
}

double TrialMetrics::mean_base_distance() const {
  if (base_distances.empty()) return 0.0;
  return std::accumulate(base_distances.begin(), base_distances.end(), 0.0) /
         static_cast<double>(base_distances.size());
}

namespace {

std::vector<AerialUnit> to_aerial(const std::vector<DeploymentUnit>& units, double tx_power) {
  std::vector<AerialUnit> out;
  for (const DeploymentUnit& u : units) out.push_back({u.positions, tx_power});
  return out;
}

// Ground staging slots near the base corner, spaced well outside the barrier band.
std::vector<Vec3> staging_points(const Region& region, std::size_t n, double spacing) {
  std::vector<Vec3> out;
  const std::size_t per_row = 10;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back({region.origin.x + spacing * (0.5 + static_cast<double>(k % per_row)),
                   region.origin.y + spacing * (0.5 + static_cast<double>(k / per_row)), 0.0});
  }
  return out;
}

}  // namespace

TrialMetrics run_pipeline(const Scene& scene, const ScenarioConfig& config, std::vector<Checkpoint> checkpoints,
                          std::optional<std::vector<int>> fixed_order, TrialArtifacts* artifacts) {
  try {
    TrialMetrics m;
    m.seed = scene.seed;
    const ChannelParams params = config.channel_params();
    const std::vector<Transmitter> active = scene.active_stations();

    CheckpointGraph graph;
    if (!checkpoints.empty()) {
      if (fixed_order) {
        graph.checkpoints = std::move(checkpoints);
        graph.visit_order = *fixed_order;
        graph.path_length = route_length(graph.checkpoints, graph.visit_order);
      } else {
        StartSpec start{config.start_policy, 0, mix_seed(scene.seed, 4)};
        graph = plan_patrol_path(std::move(checkpoints), start, config.planner);
      }
    }
    FadingSpec fading{config.fading, config.fading_draws, mix_seed(scene.seed, 5)};
    LabelResult labeled = label_checkpoints(graph, active, params, config.gamma_linear(), config.patrol_height, fading);

    const double r1 = config.r1();
    const double r2 = config.r2();
    std::vector<DeploymentUnit> units;
    if (config.mode == ScheduleMode::Offline) {
      units = schedule_offline(labeled.graph, config.altitudes, config.split_runs ? 2.0 * r2 : 0.0);
    } else {
      const double d1 = config.dedup_disk ? r1 : 0.0;
      const double d2 = config.dedup_disk ? r2 : 0.0;
      units = schedule_online(labeled.stream, config.altitudes, {config.window, d1, d2, true});
    }

    m.checkpoints = labeled.graph.checkpoints.size();
    m.path_length = labeled.graph.path_length;
    for (const Checkpoint& c : labeled.graph.checkpoints) {
      if (c.label == Label::Red) m.red_ids.push_back(c.id);
    }
    m.red_checkpoints = m.red_ids.size();

    // Patrol starts at the first checkpoint; ABSs launch from the region's origin corner.
    std::vector<double> arrive(labeled.stream.size(), 0.0);
    for (std::size_t k = 1; k < arrive.size(); ++k) {
      arrive[k] = arrive[k - 1] + distance(labeled.stream[k - 1].position, labeled.stream[k].position) / config.speed;
    }
    const double patrol_total = arrive.empty() ? 0.0 : arrive.back();
    for (const DeploymentUnit& u : units) {
      (u.kind == UnitKind::Config1 ? m.config1_units : m.config2_units) += 1;
      m.abs_count += static_cast<long>(u.positions.size());
      (u.kind == UnitKind::Config1 ? m.small_groups : m.big_groups).push_back(u.targets);
      const double decided = config.mode == ScheduleMode::Offline ? patrol_total : arrive[u.decision_index - 1];
      const double reach = distance(config.region.origin, u.anchor);
      for (std::size_t t = 0; t < u.targets.size(); ++t) {
        m.completion_times.push_back(decided + reach / config.speed);
        m.base_distances.push_back(reach);
      }
    }

    const CoverageMap before = build_coverage_map(config.region, active, {}, params, config.resolution,
                                                  config.ue_height, config.gamma_linear());
    const std::vector<AerialUnit> aerial = to_aerial(units, dbm_to_watts(config.abs_tx_dbm));
    CoverageMap after = units.empty() ? before
                                      : build_coverage_map(config.region, active, aerial, params, config.resolution,
                                                           config.ue_height, config.gamma_linear());
    m.coverage_before = before.covered_fraction();
    m.coverage_after = after.covered_fraction();
    if (m.abs_count > 0) {
      m.per_abs_improvement = (after.covered_area() - before.covered_area()) / static_cast<double>(m.abs_count);
    }

    std::optional<TrajectoryLog> log;
    if (config.fly && !units.empty()) {
      const double spacing = 3.0 * config.control.r_d;
      std::size_t agents_needed = 0;
      for (const DeploymentUnit& u : units) agents_needed += u.positions.size();
      const auto takeoff = staging_points(config.region, agents_needed, spacing);
      SimOptions so;
      so.duration = config.fly_horizon;
      log = simulate(agents_for_units(units, takeoff), config.control, so);
      m.flight_settle_time = log->settle_time(0.5, 0.05, 0.0, config.fly_horizon);
      m.min_separation = *std::min_element(log->min_distance.begin(), log->min_distance.end());
    }

    if (artifacts) {
      artifacts->graph = std::move(labeled.graph);
      artifacts->stream = std::move(labeled.stream);
      artifacts->units = std::move(units);
      artifacts->before = before;
      artifacts->after = std::move(after);
      artifacts->trajectory = std::move(log);
    }
    return m;
  } catch (const CollisionFault& e) {
    throw CollisionFault("trial seed " + std::to_string(scene.seed) + ": " + e.what(), e.time(), e.agent_a(),
                         e.agent_b());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error("trial seed " + std::to_string(scene.seed) + ": " + e.what());
  }
}

TrialMetrics run_trial(const Scene& scene, const ScenarioConfig& config, TrialArtifacts* artifacts) {
  auto cps = generate_checkpoints(config.region, config.cp_density_km2 * 1e-6, config.exclusion_radius,
                                  mix_seed(scene.seed, 3));
  return run_pipeline(scene, config, std::move(cps), std::nullopt, artifacts);
}

TrialMetrics run_baseline_bsl(const Scene& scene, const ScenarioConfig& config, TrialArtifacts* artifacts) {
  std::vector<Vec2> sites;
  for (const Transmitter& t : scene.stations) sites.push_back(t.position.ground());
  return run_pipeline(scene, config, make_checkpoints(sites), std::nullopt, artifacts);
}

std::pair<std::vector<Checkpoint>, std::vector<int>> grid_checkpoints(const Region& region, int g) {
  if (g < 1) throw InvalidParameter("grid size must be at least 1");
  std::vector<Vec2> pts;
  std::vector<int> order;
  const double cw = region.width / g;
  const double chh = region.height / g;
  for (int row = 0; row < g; ++row) {
    const double y = region.origin.y + region.height - (row + 0.5) * chh;
    for (int col = 0; col < g; ++col) {
      pts.push_back({region.origin.x + (col + 0.5) * cw, y});
    }
  }
  for (int row = 0; row < g; ++row) {
    for (int k = 0; k < g; ++k) {
      const int col = row % 2 == 0 ? k : g - 1 - k;
      order.push_back(row * g + col);
    }
  }
  return {make_checkpoints(pts), order};
}

TrialMetrics run_baseline_grid(const Scene& scene, const ScenarioConfig& config, TrialArtifacts* artifacts) {
  auto [cps, order] = grid_checkpoints(config.region, config.grid_size);
  return run_pipeline(scene, config, std::move(cps), std::move(order), artifacts);
}

TrialMetrics run_method(const Scene& scene, const ScenarioConfig& config, TrialArtifacts* artifacts) {
  switch (config.method) {
    case Method::Bsl:
      return run_baseline_bsl(scene, config, artifacts);
    case Method::Grid:
      return run_baseline_grid(scene, config, artifacts);
    default:
      return run_trial(scene, config, artifacts);
  }
}

Stats describe(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  // Linear interpolation between order statistics.
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.min = v.front();
  s.max = v.back();
  s.q1 = q(0.25);
  s.median = q(0.5);
  s.q3 = q(0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

Stats MonteCarloResult::stat(double (*metric)(const TrialMetrics&)) const {
  std::vector<double> v;
  v.reserve(trials.size());
  for (const TrialMetrics& t : trials) v.push_back(metric(t));
  return describe(std::move(v));
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string join_groups(const std::vector<std::vector<int>>& groups) {
  std::string out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g) out += ';';
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      if (k) out += ' ';
      out += std::to_string(groups[g][k]);
    }
  }
  return out;
}

const char* kMetricsHeader =
    "trial,seed,coverage_before,coverage_after,improvement,abs_count,config1_units,config2_units,"
    "per_abs_improvement_m2,checkpoints,red_checkpoints,path_length_m,mean_completion_s,mean_base_distance_m,"
    "flight_settle_s,min_separation_m,small_groups,big_groups\n";

std::string metrics_row(std::size_t k, const TrialMetrics& t) {
  std::string row = std::to_string(k) + ',' + std::to_string(t.seed) + ',' + fmt(t.coverage_before) + ',' +
                    fmt(t.coverage_after) + ',' + fmt(t.improvement()) + ',' + std::to_string(t.abs_count) + ',' +
                    std::to_string(t.config1_units) + ',' + std::to_string(t.config2_units) + ',' +
                    fmt(t.per_abs_improvement) + ',' + std::to_string(t.checkpoints) + ',' +
                    std::to_string(t.red_checkpoints) + ',' + fmt(t.path_length) + ',' + fmt(t.mean_completion()) +
                    ',' + fmt(t.mean_base_distance()) + ',' + fmt(t.flight_settle_time) + ',' +
                    fmt(t.min_separation) + ",\"" + join_groups(t.small_groups) + "\",\"" +
                    join_groups(t.big_groups) + "\"\n";
  return row;
}

nlohmann::ordered_json stats_json(const Stats& s) {
  return {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}, {"mean", s.mean}};
}

}  // namespace

std::string MonteCarloResult::metrics_csv() const {
  std::string out = kMetricsHeader;
  for (std::size_t k = 0; k < trials.size(); ++k) out += metrics_row(k, trials[k]);
  return out;
}

std::string MonteCarloResult::summary_json(const ScenarioConfig& config) const {
  nlohmann::ordered_json j;
  j["method"] = to_string(config.method);
  j["mode"] = to_string(config.mode);
  j["trials"] = trials.size();
  j["seed"] = config.seed;
  j["r1_m"] = config.r1();
  j["r2_m"] = config.r2();
  const FleetBounds fb = abs_count_bounds(config.region, config.r1(), config.r2());
  j["abs_count_bounds"] = {fb.min, fb.max};
  nlohmann::ordered_json metrics;
  metrics["coverage_before"] = stats_json(stat([](const TrialMetrics& t) { return t.coverage_before; }));
  metrics["coverage_after"] = stats_json(stat([](const TrialMetrics& t) { return t.coverage_after; }));
  metrics["improvement"] = stats_json(stat([](const TrialMetrics& t) { return t.improvement(); }));
  metrics["abs_count"] = stats_json(stat([](const TrialMetrics& t) { return static_cast<double>(t.abs_count); }));
  metrics["per_abs_improvement_m2"] = stats_json(stat([](const TrialMetrics& t) { return t.per_abs_improvement; }));
  metrics["red_checkpoints"] =
      stats_json(stat([](const TrialMetrics& t) { return static_cast<double>(t.red_checkpoints); }));
  metrics["mean_completion_s"] = stats_json(stat([](const TrialMetrics& t) { return t.mean_completion(); }));
  j["metrics"] = metrics;
  // Delay model with the measured mean base distance over trials that deployed anything.
  std::vector<double> reach;
  for (const TrialMetrics& t : trials) {
    if (!t.base_distances.empty()) reach.push_back(t.mean_base_distance());
  }
  DelayParams dp;
  dp.beta = config.beta;
  dp.speed = config.speed;
  dp.side = std::sqrt(config.region.area());
  dp.lambda_cp = config.cp_density_km2 * 1e-6;
  const double mean_r = reach.empty() ? 0.0 : describe(reach).mean;
  nlohmann::ordered_json delay;
  delay["beta"] = config.beta;
  delay["discovery_time_s"] = expected_discovery_time(dp);
  delay["mean_base_distance_m"] = mean_r;
  delay["predicted_completion_s"] = expected_completion(dp, mean_r, config.mode);
  j["delay_model"] = delay;
  return j.dump(2);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) { return mix_seed(master, 1000 + trial); }

MonteCarloResult monte_carlo(const ScenarioConfig& config, unsigned workers) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.trials);
  MonteCarloResult out;
  out.trials.resize(n);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        const Scene scene = build_scenario(config, trial_seed(config.seed, k));
        out.trials[k] = run_method(scene, config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next = n;
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

std::vector<OrderStudyRow> visiting_order_study(const Scene& scene, const ScenarioConfig& config,
                                                const std::vector<StartPolicy>& policies) {
  const auto cps = generate_checkpoints(config.region, config.cp_density_km2 * 1e-6, config.exclusion_radius,
                                        mix_seed(scene.seed, 3));
  std::vector<OrderStudyRow> rows;
  for (StartPolicy p : policies) {
    ScenarioConfig c = config;
    c.start_policy = p;
    OrderStudyRow row;
    row.policy = p;
    row.start_id = cps.empty() ? -1 : resolve_start(cps, {p, 0, mix_seed(scene.seed, 4)});
    row.metrics = run_pipeline(scene, c, cps);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string order_study_csv(const std::vector<OrderStudyRow>& rows) {
  std::string out =
      "policy,start_id,coverage_before,coverage_after,abs_count,config1_units,config2_units,red_checkpoints,"
      "path_length_m,small_groups,big_groups\n";
  for (const OrderStudyRow& r : rows) {
    const TrialMetrics& t = r.metrics;
    out += to_string(r.policy) + ',' + std::to_string(r.start_id) + ',' + fmt(t.coverage_before) + ',' +
           fmt(t.coverage_after) + ',' + std::to_string(t.abs_count) + ',' + std::to_string(t.config1_units) + ',' +
           std::to_string(t.config2_units) + ',' + std::to_string(t.red_checkpoints) + ',' + fmt(t.path_length) +
           ",\"" + join_groups(t.small_groups) + "\",\"" + join_groups(t.big_groups) + "\"\n";
  }
  return out;
}

}  // namespace uavcov
