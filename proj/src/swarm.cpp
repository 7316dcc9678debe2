#include "uavcov/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace uavcov {

Adjacency default_adjacency() {
  Adjacency a{{{0, 1, 0, 1}, {0, 0, 1, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}}};
  for (auto& row : a) {
    for (double& w : row) w *= 0.01;
  }
  return a;
}

void require_strongly_connected(const Adjacency& a) {
  for (int i = 0; i < 4; ++i) {
    if (a[i][i] != 0.0) throw InvalidTopology("adjacency diagonal must be zero");
    for (int j = 0; j < 4; ++j) {
      if (a[i][j] < 0.0) throw InvalidTopology("adjacency weights must be non-negative");
    }
  }
  // Floyd-Warshall reachability.
  std::array<std::array<bool, 4>, 4> r{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = i == j || a[i][j] > 0.0;
  }
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (!r[i][j]) throw InvalidTopology("swarm adjacency is not strongly connected");
    }
  }
}

void ControlParams::validate() const {
  if (!(b >= 0.0)) throw InvalidParameter("b must be non-negative");
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw InvalidParameter("drag coefficients must be non-negative");
  if (!(r_c > 0.0) || !(r_d >= r_c)) throw InvalidParameter("need 0 < r_c <= r_d");
  if (!(v_max > 0.0)) throw InvalidParameter("v_max must be positive");
  require_strongly_connected(adjacency);
}

Vec3 drag_accel(const Vec3& v, double k1, double k2, double mass) {
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  const double s = v.norm();
  if (s == 0.0) return {};
  return v * (-(k1 + k2 * s) / mass);
}

double potential(const Vec3& xi, const Vec3& xk, double r_c, double r_d) {
  const double s = (xi - xk).squared_norm();
  const double rc2 = r_c * r_c;
  const double rd2 = r_d * r_d;
  if (s <= rc2) throw InvalidGeometry("agents inside the collision radius");
  if (s >= rd2) return 0.0;
  const double q = (rd2 - s) / (s - rc2);
  return q * q;
}

Vec3 potential_gradient(const Vec3& xi, const Vec3& xk, double r_c, double r_d) {
  const Vec3 d = xk - xi;
  const double s = d.squared_norm();
  const double rc2 = r_c * r_c;
  const double rd2 = r_d * r_d;
  if (s <= rc2) throw InvalidGeometry("agents inside the collision radius");
  if (s >= rd2) return {};
  const double den = s - rc2;
  return d * (4.0 * (rd2 - rc2) * (rd2 - s) / (den * den * den));
}

namespace {

double sat_axis(double e, double c, double eps) {
  if (std::abs(e) > eps) return c * eps * (e > 0.0 ? 1.0 : -1.0);
  return c * e;
}

double sat_energy_axis(double e, double c, double eps) {
  const double a = std::abs(e);
  if (a > eps) return c * (eps * a - 0.5 * eps * eps);
  return c * 0.5 * e * e;
}

}  // namespace

Vec3 adaptive_term(const Vec3& x_tilde, double c, double eps) {
  return {sat_axis(x_tilde.x, c, eps), sat_axis(x_tilde.y, c, eps), sat_axis(x_tilde.z, c, eps)};
}

double adaptive_energy(const Vec3& x_tilde, double c, double eps) {
  return sat_energy_axis(x_tilde.x, c, eps) + sat_energy_axis(x_tilde.y, c, eps) +
         sat_energy_axis(x_tilde.z, c, eps);
}

namespace {

Vec3 repulsion(std::size_t i, std::span<const AgentState> agents, const ControlParams& p) {
  Vec3 g{};
  for (std::size_t k = 0; k < agents.size(); ++k) {
    if (k != i) g = g + potential_gradient(agents[i].x, agents[k].x, p.r_c, p.r_d);
  }
  return g;
}

Vec3 formation_term(std::size_t i, std::span<const AgentState> agents, const Adjacency& a) {
  const AgentState& ai = agents[i];
  Vec3 f{};
  for (std::size_t j = 0; j < agents.size(); ++j) {
    const AgentState& aj = agents[j];
    if (j == i || aj.group != ai.group) continue;
    const double w = a[ai.member][aj.member];
    if (w != 0.0) f = f + (ai.x - aj.x - ai.x_star + aj.x_star) * w;
  }
  return f;
}

std::size_t group_size(std::size_t i, std::span<const AgentState> agents) {
  return static_cast<std::size_t>(std::count_if(agents.begin(), agents.end(), [&](const AgentState& s) {
    return s.group == agents[i].group;
  }));
}

// Precomputed group layout so the integrator avoids per-call searches.
struct Layout {
  std::vector<std::vector<std::size_t>> swarm_of;  // per agent: fellow members, empty for singletons
};

Layout make_layout(std::span<const AgentState> agents) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < agents.size(); ++i) groups[agents[i].group].push_back(i);
  Layout l;
  l.swarm_of.resize(agents.size());
  for (const auto& [g, members] : groups) {
    if (members.size() == 1) continue;
    if (members.size() != 4) throw InvalidTopology("a swarm must have exactly four members");
    std::array<bool, 4> used{};
    for (std::size_t i : members) {
      const int m = agents[i].member;
      if (m < 0 || m > 3 || used[m]) throw InvalidTopology("swarm member slots must be 0..3 and distinct");
      used[m] = true;
      l.swarm_of[i] = members;
    }
  }
  return l;
}

void accelerations(std::span<const AgentState> agents, const Layout& layout, const ControlParams& p,
                   std::vector<Vec3>& out) {
  const std::size_t n = agents.size();
  out.assign(n, Vec3{});
  const double rc2 = p.r_c * p.r_c;
  const double rd2 = p.r_d * p.r_d;
  const double kk = 4.0 * (rd2 - rc2);
  // Pairwise barrier gradients, accumulated symmetrically.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const Vec3 d = agents[k].x - agents[i].x;
      const double s = d.squared_norm();
      if (s >= rd2) continue;
      if (s <= rc2) throw InvalidGeometry("agents inside the collision radius");
      const double den = s - rc2;
      const Vec3 g = d * (kk * (rd2 - s) / (den * den * den));
      out[i] = out[i] + g;
      out[k] = out[k] - g;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = agents[i];
    Vec3 u = out[i] + a.v * p.b + adaptive_term(a.x - a.x_dest, p.c, p.eps);
    for (std::size_t j : layout.swarm_of[i]) {
      if (j == i) continue;
      const double w = p.adjacency[a.member][agents[j].member];
      if (w != 0.0) u = u + (a.x - agents[j].x - a.x_star + agents[j].x_star) * w;
    }
    out[i] = drag_accel(a.v, p.k1, p.k2, a.mass) - u;
  }
}

}  // namespace

Vec3 control_config1(std::size_t i, std::span<const AgentState> agents, const ControlParams& p) {
  const AgentState& a = agents[i];
  return a.v * (-p.b) - repulsion(i, agents, p) - adaptive_term(a.x - a.x_dest, p.c, p.eps);
}

Vec3 control_config2(std::size_t i, std::span<const AgentState> agents, const ControlParams& p) {
  require_strongly_connected(p.adjacency);
  const AgentState& a = agents[i];
  const Vec3 bracket = formation_term(i, agents, p.adjacency) + a.v * p.b + repulsion(i, agents, p) +
                       adaptive_term(a.x - a.x_dest, p.c, p.eps);
  return bracket * -1.0;
}

Vec3 control(std::size_t i, std::span<const AgentState> agents, const ControlParams& p) {
  return group_size(i, agents) == 1 ? control_config1(i, agents, p) : control_config2(i, agents, p);
}

double min_agent_distance(std::span<const AgentState> agents) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t k = i + 1; k < agents.size(); ++k) {
      best = std::min(best, distance(agents[i].x, agents[k].x));
    }
  }
  return best;
}

namespace {

void apply_impulses(std::vector<AgentState>& s, double t, double dt, std::span<const Impulse> impulses) {
  for (const Impulse& imp : impulses) {
    if (imp.time >= t - 0.5 * dt && imp.time < t + 0.5 * dt) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (imp.agent < 0 || static_cast<std::size_t>(imp.agent) == i) s[i].v = s[i].v + imp.dv;
      }
    }
  }
}

void check_collisions(const std::vector<AgentState>& s, double r_c, double t) {
  const double rc2 = r_c * r_c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = i + 1; k < s.size(); ++k) {
      if ((s[i].x - s[k].x).squared_norm() <= rc2) {
        std::ostringstream msg;
        msg << "collision between agents " << i << " and " << k << " at t=" << t;
        throw CollisionFault(msg.str(), t, static_cast<int>(i), static_cast<int>(k));
      }
    }
  }
}

struct Stepper {
  const ControlParams& p;
  Layout layout;
  std::vector<AgentState> tmp;
  std::array<std::vector<Vec3>, 4> kv;

  std::vector<AgentState> advance(const std::vector<AgentState>& s0, double dt) {
    const std::size_t n = s0.size();
    std::array<std::vector<Vec3>, 4> kx;
    tmp = s0;
    accelerations(tmp, layout, p, kv[0]);
    kx[0].resize(n);
    for (std::size_t i = 0; i < n; ++i) kx[0][i] = s0[i].v;
    const double frac[3] = {0.5, 0.5, 1.0};
    for (int st = 1; st < 4; ++st) {
      kx[st].resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        tmp[i].x = s0[i].x + kx[st - 1][i] * (frac[st - 1] * dt);
        tmp[i].v = s0[i].v + kv[st - 1][i] * (frac[st - 1] * dt);
        kx[st][i] = tmp[i].v;
      }
      accelerations(tmp, layout, p, kv[st]);
    }
    std::vector<AgentState> out = s0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i].x = s0[i].x + (kx[0][i] + kx[1][i] * 2.0 + kx[2][i] * 2.0 + kx[3][i]) * (dt / 6.0);
      out[i].v = s0[i].v + (kv[0][i] + kv[1][i] * 2.0 + kv[2][i] * 2.0 + kv[3][i]) * (dt / 6.0);
      const double sp = out[i].v.norm();
      if (sp > p.v_max) out[i].v = out[i].v * (p.v_max / sp);
    }
    return out;
  }
};

}  // namespace

std::vector<AgentState> step(std::span<const AgentState> agents, const ControlParams& p, double dt,
                             double t, std::span<const Impulse> impulses) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  std::vector<AgentState> s(agents.begin(), agents.end());
  apply_impulses(s, t, dt, impulses);
  Stepper st{p, make_layout(s), {}, {}};
  std::vector<AgentState> out;
  try {
    out = st.advance(s, dt);
  } catch (const InvalidGeometry&) {
    throw CollisionFault("collision radius entered during integration", t, -1, -1);
  }
  check_collisions(out, p.r_c, t + dt);
  return out;
}

LyapunovTerms lyapunov_terms(std::span<const AgentState> agents, const ControlParams& p) {
  LyapunovTerms v;
  const std::size_t n = agents.size();
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = agents[i];
    const Vec3 ei = a.x - a.x_dest;
    v.kinetic += a.v.squared_norm();
    v.error += adaptive_energy(ei, p.c, p.eps);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const AgentState& b = agents[j];
      v.barrier += potential(a.x, b.x, p.r_c, p.r_d);
      if (b.group == a.group) {
        const double w = 0.5 * (p.adjacency[a.member][b.member] + p.adjacency[b.member][a.member]);
        v.formation += 0.5 * w * (ei - (b.x - b.x_dest)).squared_norm();
      }
    }
  }
  return v;
}

double lyapunov_value(std::span<const AgentState> agents, const ControlParams& p) {
  return lyapunov_terms(agents, p).energy();
}

std::string TrajectoryLog::to_csv(std::span<const std::size_t> agents) const {
  std::ostringstream os;
  os.precision(10);
  nlohmann::ordered_json head;
  head["dt"] = dt;
  head["sample_every"] = sample_every;
  const std::size_t total = snapshots.empty() ? 0 : snapshots.front().size();
  std::vector<std::size_t> cols(agents.begin(), agents.end());
  if (cols.empty()) {
    for (std::size_t i = 0; i < total; ++i) cols.push_back(i);
  }
  head["agents"] = cols;
  if (!params_json.empty()) head["params"] = nlohmann::json::parse(params_json);
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (const Impulse& e : events) ev.push_back({{"time", e.time}, {"agent", e.agent}, {"dv", {e.dv.x, e.dv.y, e.dv.z}}});
  head["events"] = ev;
  os << "# " << head.dump() << "\n";
  os << "t";
  for (std::size_t i : cols) {
    os << ",x" << i << ",y" << i << ",z" << i << ",vx" << i << ",vy" << i << ",vz" << i;
  }
  os << ",V,min_distance,max_position_error,max_velocity_error\n";
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const std::size_t idx = k * sample_every;
    os << snapshot_time[k];
    for (std::size_t i : cols) {
      const AgentState& a = snapshots[k][i];
      os << ',' << a.x.x << ',' << a.x.y << ',' << a.x.z << ',' << a.v.x << ',' << a.v.y << ',' << a.v.z;
    }
    os << ',' << lyapunov[idx] << ',' << min_distance[idx] << ',' << max_position_error[idx] << ','
       << max_velocity_error[idx] << "\n";
  }
  return os.str();
}

double TrajectoryLog::settle_time(double pos_tol, double vel_tol, double from, double until) const {
  double settled = -1.0;
  for (std::size_t k = 0; k < time.size(); ++k) {
    if (time[k] < from) continue;
    if (time[k] > until) break;
    const bool ok = max_position_error[k] < pos_tol && max_velocity_error[k] < vel_tol;
    if (!ok) {
      settled = -1.0;
    } else if (settled < 0.0) {
      settled = time[k];
    }
  }
  return settled;
}

namespace {

void record(TrajectoryLog& log, const std::vector<AgentState>& s, const ControlParams& p, double t) {
  double pe = 0.0;
  double ve = 0.0;
  for (const AgentState& a : s) {
    pe = std::max(pe, distance(a.x, a.x_dest));
    ve = std::max(ve, a.v.norm());
  }
  log.time.push_back(t);
  log.lyapunov.push_back(lyapunov_value(s, p));
  log.min_distance.push_back(s.size() > 1 ? min_agent_distance(s) : std::numeric_limits<double>::infinity());
  log.max_position_error.push_back(pe);
  log.max_velocity_error.push_back(ve);
}

}  // namespace

TrajectoryLog simulate(std::vector<AgentState> agents, const ControlParams& p, const SimOptions& opts) {
  p.validate();
  if (!(opts.dt > 0.0) || !(opts.duration >= 0.0)) throw InvalidParameter("invalid simulation horizon");
  if (opts.sample_every == 0) throw InvalidParameter("sample_every must be positive");
  if (agents.size() > 1 && min_agent_distance(agents) <= p.r_c) {
    throw PreconditionViolation("initial placement violates the collision radius");
  }
  TrajectoryLog log;
  log.dt = opts.dt;
  log.sample_every = opts.sample_every;
  log.events = opts.impulses;
  nlohmann::ordered_json pj;
  pj["b"] = p.b;
  pj["c"] = p.c;
  pj["eps"] = p.eps;
  pj["k1"] = p.k1;
  pj["k2"] = p.k2;
  pj["r_c"] = p.r_c;
  pj["r_d"] = p.r_d;
  pj["v_max"] = p.v_max;
  pj["adjacency"] = p.adjacency;
  log.params_json = pj.dump();

  Stepper st{p, make_layout(agents), {}, {}};
  const auto steps = static_cast<std::size_t>(std::llround(opts.duration / opts.dt));
  record(log, agents, p, 0.0);
  log.snapshot_time.push_back(0.0);
  log.snapshots.push_back(agents);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    apply_impulses(agents, t, opts.dt, opts.impulses);
    try {
      agents = st.advance(agents, opts.dt);
    } catch (const InvalidGeometry&) {
      throw CollisionFault("collision radius entered during integration", t, -1, -1);
    }
    const double t1 = static_cast<double>(k + 1) * opts.dt;
    check_collisions(agents, p.r_c, t1);
    record(log, agents, p, t1);
    if ((k + 1) % opts.sample_every == 0) {
      log.snapshot_time.push_back(t1);
      log.snapshots.push_back(agents);
    }
  }
  return log;
}

std::vector<AgentState> agents_for_units(std::span<const DeploymentUnit> units,
                                         std::span<const Vec3> takeoff) {
  std::vector<AgentState> out;
  std::size_t next = 0;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const DeploymentUnit& unit = units[u];
    Vec3 centroid{};
    for (const Vec3& p : unit.positions) centroid = centroid + p;
    centroid = centroid * (1.0 / static_cast<double>(unit.positions.size()));
    for (std::size_t m = 0; m < unit.positions.size(); ++m) {
      if (next >= takeoff.size()) throw InvalidParameter("not enough takeoff points for the deployment");
      AgentState a;
      a.x = takeoff[next++];
      a.x_dest = unit.positions[m];
      a.x_star = unit.kind == UnitKind::Config2 ? unit.positions[m] - centroid : Vec3{};
      a.group = static_cast<int>(u);
      a.member = static_cast<int>(m);
      out.push_back(a);
    }
  }
  return out;
}

CaseStudy make_case_study(std::uint64_t seed, double h_a, double h_b) {
  const std::array<Vec2, 5> anchors{{{300, 350}, {400, 420}, {470, 300}, {320, 230}, {430, 180}}};
  CaseStudy cs;
  for (Vec2 a : anchors) cs.units.push_back(make_config2(a, h_a, h_b));
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  std::vector<Vec3> takeoff;
  const std::size_t need = 4 * anchors.size();
  while (takeoff.size() < need) {
    const Vec3 p{u(rng), u(rng), 0.0};
    bool ok = true;
    for (const Vec3& q : takeoff) ok = ok && distance(p, q) > 30.0;
    if (ok) takeoff.push_back(p);
  }
  cs.agents = agents_for_units(cs.units, takeoff);
  return cs;
}

}  // namespace uavcov
