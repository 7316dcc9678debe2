#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "uavcov/detection.hpp"

using namespace uavcov;

namespace {

bool is_permutation_of_ids(const CheckpointGraph& g) {
  std::vector<int> v = g.visit_order;
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != static_cast<int>(i)) return false;
  }
  return v.size() == g.checkpoints.size();
}

double brute_length(const std::vector<Checkpoint>& cps, const std::vector<int>& order) {
  double s = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double dx = cps[order[k]].position.x - cps[order[k - 1]].position.x;
    const double dy = cps[order[k]].position.y - cps[order[k - 1]].position.y;
    s += std::sqrt(dx * dx + dy * dy);
  }
  return s;
}

// Expected type-I survivor count on a square window by midpoint quadrature:
// lambda * integral over A of exp(-lambda |B(x, D) ∩ A|).
double survivor_oracle(double side, double lambda, double d) {
  const int n = 100;
  const int m = 60;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = (i + 0.5) * side / n;
      const double y = (j + 0.5) * side / n;
      double inside = 0.0;
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const double u = x - d + (a + 0.5) * 2.0 * d / m;
          const double v = y - d + (b + 0.5) * 2.0 * d / m;
          if (u < 0 || u > side || v < 0 || v > side) continue;
          if ((u - x) * (u - x) + (v - y) * (v - y) <= d * d) inside += 1.0;
        }
      }
      const double area = inside * (2.0 * d / m) * (2.0 * d / m);
      total += std::exp(-lambda * area) * (side / n) * (side / n);
    }
  }
  return lambda * total;
}

}  // namespace

TEST_CASE("checkpoints: hard core and determinism") {
  const Region r{1000.0, 1000.0};
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto cps = generate_checkpoints(r, 200e-6, 60.0, s);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      CHECK(cps[i].id == static_cast<int>(i));
      CHECK(cps[i].label == Label::Unvisited);
      for (std::size_t j = i + 1; j < cps.size(); ++j) CHECK(distance(cps[i].position, cps[j].position) >= 60.0);
    }
  }
  const auto a = generate_checkpoints(r, 50e-6, 100.0, 8);
  const auto b = generate_checkpoints(r, 50e-6, 100.0, 8);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].position == b[i].position);
  CHECK_THROWS_AS(generate_checkpoints(r, 50e-6, 0.0, 1), InvalidParameter);
}

TEST_CASE("checkpoints: exclusion radius beyond the diagonal leaves nothing") {
  const Region r{100.0, 100.0};
  int tested = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    if (sample_ppp(r, 1e-3, s).size() < 2) continue;
    ++tested;
    CHECK(generate_checkpoints(r, 1e-3, 200.0, s).empty());
  }
  CHECK(tested > 10);
}

TEST_CASE("checkpoints: survivor count matches the edge-aware oracle") {
  const Region r{1000.0, 1000.0};
  const double lambda = 50e-6;
  const double d = 100.0;
  const double oracle = survivor_oracle(1000.0, lambda, d);
  CHECK(oracle > lambda * std::exp(-lambda * kPi * d * d) * 1e6);  // window edges help survival
  const int trials = 1000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += static_cast<double>(generate_checkpoints(r, lambda, d, mix_seed(21, t)).size());
  CHECK(std::abs(sum / trials / oracle - 1.0) < 0.05);
}

TEST_CASE("checkpoints: interior intensity matches the plane formula") {
  // 50/km^2 with D = 100 m on 1 km^2: about 10.4 survivors per km^2 away from the edges.
  const Region r{1000.0, 1000.0};
  const double lambda = 50e-6;
  const double d = 100.0;
  double inside = 0.0;
  for (int t = 0; t < 1000; ++t) {
    for (const Checkpoint& c : generate_checkpoints(r, lambda, d, mix_seed(22, t))) {
      const Vec2 p = c.position;
      inside += p.x >= d && p.x <= 1000.0 - d && p.y >= d && p.y <= 1000.0 - d;
    }
  }
  const double per_km2 = inside / 1000.0 / (0.8 * 0.8);
  CHECK(50.0 * std::exp(-kPi * lambda * d * d) == doctest::Approx(10.4).epsilon(0.01));
  CHECK(std::abs(per_km2 / 10.4 - 1.0) < 0.15);
}

TEST_CASE("patrol: collinear points from the left end go left to right") {
  const std::vector<Vec2> pts{{30.0, 0.0}, {0.0, 0.0}, {50.0, 0.0}, {10.0, 0.0}, {70.0, 0.0}};
  const CheckpointGraph g = plan_patrol_path(make_checkpoints(pts), {StartPolicy::LeftMost});
  CHECK(g.visit_order == std::vector<int>{1, 3, 0, 2, 4});
  CHECK(g.path_length == doctest::Approx(70.0));
}

TEST_CASE("patrol: ties go to the lowest id") {
  const std::vector<Vec2> pts{{0.0, 0.0}, {0.0, 10.0}, {10.0, 0.0}, {-10.0, 0.0}};
  const CheckpointGraph g = plan_patrol_path(make_checkpoints(pts), {StartPolicy::Fixed, 0});
  CHECK(g.visit_order[1] == 1);
}

TEST_CASE("patrol: greedy sits between the optimum and bad random orders") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({u(rng), u(rng)});
    const auto cps = make_checkpoints(pts);
    const CheckpointGraph g = plan_patrol_path(cps, {StartPolicy::LeftMost});
    REQUIRE(is_permutation_of_ids(g));
    CHECK(g.path_length == doctest::Approx(brute_length(cps, g.visit_order)));

    std::vector<int> perm{0, 1, 2, 3, 4, 5};
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      std::shuffle(perm.begin(), perm.end(), rng);
      worst = std::max(worst, brute_length(cps, perm));
    }
    std::sort(perm.begin(), perm.end());
    double best = INFINITY;
    double best_from_start = INFINITY;
    do {
      const double len = brute_length(cps, perm);
      best = std::min(best, len);
      if (perm[0] == g.visit_order[0]) best_from_start = std::min(best_from_start, len);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(g.path_length <= worst + 1e-9);
    CHECK(g.path_length >= best - 1e-9);

    const CheckpointGraph exact = plan_patrol_path(cps, {StartPolicy::LeftMost}, PathPlanner::Exact);
    CHECK(exact.path_length == doctest::Approx(best_from_start));
    const CheckpointGraph opt2 = plan_patrol_path(cps, {StartPolicy::LeftMost}, PathPlanner::GreedyTwoOpt);
    CHECK(is_permutation_of_ids(opt2));
    CHECK(opt2.visit_order[0] == g.visit_order[0]);
    CHECK(opt2.path_length <= g.path_length + 1e-9);
    CHECK(opt2.path_length >= best_from_start - 1e-9);
  }
}

TEST_CASE("patrol: start policies") {
  const std::vector<Vec2> pts{{50.0, 50.0}, {0.0, 40.0}, {90.0, 10.0}, {40.0, 95.0}, {60.0, 0.0}};
  const auto cps = make_checkpoints(pts);
  CHECK(resolve_start(cps, {StartPolicy::LeftMost}) == 1);
  CHECK(resolve_start(cps, {StartPolicy::RightMost}) == 2);
  CHECK(resolve_start(cps, {StartPolicy::TopMost}) == 3);
  CHECK(resolve_start(cps, {StartPolicy::BottomMost}) == 4);
  CHECK(resolve_start(cps, {StartPolicy::Fixed, 0}) == 0);
  const int r1 = resolve_start(cps, {StartPolicy::Random, 0, 5});
  CHECK(r1 == resolve_start(cps, {StartPolicy::Random, 0, 5}));
  CHECK(r1 >= 0);
  CHECK(r1 < 5);
  CHECK_THROWS_AS(resolve_start(cps, {StartPolicy::Fixed, 9}), InvalidParameter);
  CHECK(parse_start_policy("top-most") == StartPolicy::TopMost);
  CHECK_THROWS_AS(parse_start_policy("diagonal"), InvalidParameter);
  CHECK_THROWS_AS(plan_patrol_path({}, {}), InvalidParameter);
}

TEST_CASE("patrol: greedy is deterministic and Hamiltonian on random fields") {
  const Region r{1000.0, 1000.0};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto cps = generate_checkpoints(r, 100e-6, 50.0, s);
    if (cps.empty()) continue;
    const CheckpointGraph a = plan_patrol_path(cps, {StartPolicy::BottomMost});
    const CheckpointGraph b = plan_patrol_path(cps, {StartPolicy::BottomMost});
    CHECK(a.visit_order == b.visit_order);
    CHECK(is_permutation_of_ids(a));
    CHECK(a.path_length == doctest::Approx(brute_length(a.checkpoints, a.visit_order)));
  }
}

TEST_CASE("labels: no stations means every checkpoint is red") {
  const std::vector<Vec2> pts{{0.0, 0.0}, {100.0, 0.0}, {200.0, 0.0}};
  const CheckpointGraph g = plan_patrol_path(make_checkpoints(pts), {});
  const LabelResult res = label_checkpoints(g, {}, ChannelParams{}, 10.0, 25.0);
  CHECK(res.graph.fully_labeled());
  for (const Checkpoint& c : res.graph.checkpoints) CHECK(c.label == Label::Red);
  REQUIRE(res.stream.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(res.stream[k].step == k);
    CHECK(res.stream[k].id == g.visit_order[k]);
  }
}

TEST_CASE("labels: a checkpoint under a strong isolated station is blue") {
  ChannelParams p;
  p.noise_power = 1e-12;
  const std::vector<Transmitter> bs{{{0.0, 0.0, 30.0}, 20.0}};
  const std::vector<Vec2> pts{{0.0, 0.0}, {5000.0, 0.0}};
  const CheckpointGraph g = plan_patrol_path(make_checkpoints(pts), {StartPolicy::LeftMost});
  const LabelResult res = label_checkpoints(g, bs, p, db_to_linear(11.3), 25.0);
  CHECK(res.graph.checkpoints[0].label == Label::Blue);
  CHECK(res.stream[0].sinr > db_to_linear(11.3));

  CHECK_THROWS_AS(label_checkpoints(res.graph, bs, p, 1.0, 25.0), PreconditionViolation);
}

TEST_CASE("labels: threshold comparison is strict below") {
  ChannelParams p;
  p.noise_power = 1.0;
  const std::vector<Transmitter> bs{{{0.0, 0.0, 1.0}, 1.0}};
  const CheckpointGraph g = plan_patrol_path(make_checkpoints(std::vector<Vec2>{{0.0, 0.0}}), {});
  CHECK(label_checkpoints(g, bs, p, 1.0, 0.0).graph.checkpoints[0].label == Label::Blue);
  CHECK(label_checkpoints(g, bs, p, 1.0 + 1e-9, 0.0).graph.checkpoints[0].label == Label::Red);
}

TEST_CASE("graph json round trip") {
  const std::vector<Vec2> pts{{1.5, 2.0}, {10.0, -3.0}, {7.0, 7.0}};
  const CheckpointGraph g = plan_patrol_path(make_checkpoints(pts), {StartPolicy::LeftMost});
  const LabelResult res = label_checkpoints(g, {}, ChannelParams{}, 1.0, 25.0);
  const CheckpointGraph back = CheckpointGraph::from_json(res.graph.to_json());
  CHECK(back.visit_order == res.graph.visit_order);
  CHECK(back.path_length == doctest::Approx(res.graph.path_length));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.checkpoints[i].position == res.graph.checkpoints[i].position);
    CHECK(back.checkpoints[i].label == res.graph.checkpoints[i].label);
  }
}
