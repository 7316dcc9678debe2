#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavcov/core.hpp"
#include "uavcov/scheduling.hpp"

namespace uavcov {

struct AgentState {
  Vec3 x{};
  Vec3 v{};
  Vec3 x_dest{};
  Vec3 x_star{};  // formation offset, zero for Config 1
  double mass = 1.0;
  int group = 0;   // agents sharing a group id form one unit
  int member = 0;  // slot within a Config 2 swarm (adjacency row)
};

using Adjacency = std::array<std::array<double, 4>, 4>;

Adjacency default_adjacency();

struct ControlParams {
  double b = 0.5;
  double c = 1.0;
  double eps = 10.0;
  double k1 = 0.01;
  double k2 = 0.02;
  double r_c = 10.0;
  double r_d = 30.0;
  double v_max = 20.0;
  Adjacency adjacency = default_adjacency();

  void validate() const;
};

// Throws InvalidTopology unless the weighted digraph is strongly connected.
void require_strongly_connected(const Adjacency& a);

Vec3 drag_accel(const Vec3& v, double k1, double k2, double mass);

double potential(const Vec3& xi, const Vec3& xk, double r_c, double r_d);
Vec3 potential_gradient(const Vec3& xi, const Vec3& xk, double r_c, double r_d);

Vec3 adaptive_term(const Vec3& x_tilde, double c, double eps);

// Saturated error energy per axis; its derivative is adaptive_term.
double adaptive_energy(const Vec3& x_tilde, double c, double eps);

Vec3 control_config1(std::size_t i, std::span<const AgentState> agents, const ControlParams& p);
Vec3 control_config2(std::size_t i, std::span<const AgentState> agents, const ControlParams& p);

// Dispatches on the size of agent i's group.
Vec3 control(std::size_t i, std::span<const AgentState> agents, const ControlParams& p);

struct Impulse {
  double time = 0.0;
  Vec3 dv{};
  int agent = -1;  // -1 applies to every agent
};

// One fixed RK4 step from time t. Impulses whose time falls in [t - dt/2, t + dt/2)
// are added to velocities before integrating.
std::vector<AgentState> step(std::span<const AgentState> agents, const ControlParams& p, double dt,
                             double t = 0.0, std::span<const Impulse> impulses = {});

double min_agent_distance(std::span<const AgentState> agents);

struct LyapunovTerms {
  double formation = 0.0;  // V1
  double kinetic = 0.0;    // V2
  double barrier = 0.0;    // V3, ordered pairs
  double error = 0.0;      // V4

  double raw_sum() const { return formation + kinetic + barrier + error; }
  // Energy normalisation whose time derivative is the closed-loop power balance.
  double energy() const { return 0.5 * (formation + kinetic + barrier) + error; }
};

LyapunovTerms lyapunov_terms(std::span<const AgentState> agents, const ControlParams& p);
double lyapunov_value(std::span<const AgentState> agents, const ControlParams& p);

struct TrajectoryLog {
  double dt = 0.01;
  std::size_t sample_every = 1;
  std::vector<double> time;        // every step
  std::vector<double> lyapunov;
  std::vector<double> min_distance;
  std::vector<double> max_position_error;  // max over agents of the error norm
  std::vector<double> max_velocity_error;  // max speed, destinations are at rest
  std::vector<double> snapshot_time;
  std::vector<std::vector<AgentState>> snapshots;
  std::vector<Impulse> events;
  std::string params_json;

  // `agents` selects columns; empty writes every agent.
  std::string to_csv(std::span<const std::size_t> agents = {}) const;
  // First time after which position and velocity errors stay below the limits
  // up to `until` (inclusive). Negative when never settled.
  double settle_time(double pos_tol, double vel_tol, double from, double until) const;
};

struct SimOptions {
  double duration = 600.0;
  double dt = 0.01;
  std::size_t sample_every = 100;
  std::vector<Impulse> impulses;
};

TrajectoryLog simulate(std::vector<AgentState> agents, const ControlParams& p, const SimOptions& opts);

// Agents for a deployment: takeoff points are paired with unit positions in order.
std::vector<AgentState> agents_for_units(std::span<const DeploymentUnit> units,
                                         std::span<const Vec3> takeoff);

// Five-swarm formation scenario with random takeoff points in [0, 200]^2 on the ground.
struct CaseStudy {
  std::vector<DeploymentUnit> units;
  std::vector<AgentState> agents;
};

CaseStudy make_case_study(std::uint64_t seed, double h_a = 300.0, double h_b = 150.0);

}  // namespace uavcov
