#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "uavcov/channel.hpp"
#include "uavcov/scheduling.hpp"

using namespace uavcov;

namespace {

ChannelParams unit_params() {
  ChannelParams p;
  p.noise_power = 1.0;
  p.ref_gain = 1.0;
  p.ref_gain_a2g = 1.0;
  return p;
}

double simpson(double (*f)(double, double, double), double m, double omega, double hi, int n) {
  const double h = hi / n;
  double s = f(0.0, m, omega) + f(hi, m, omega);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h, m, omega);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("nakagami pdf values") {
  CHECK(nakagami_pdf(1.0, 1.0, 1.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-12));
  CHECK(nakagami_pdf(0.0, 3.0, 1.0) == 0.0);
  CHECK_THROWS_AS(nakagami_pdf(-1.0, 3.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(nakagami_pdf(1.0, 0.4, 1.0), InvalidParameter);
  CHECK_THROWS_AS(nakagami_pdf(1.0, 3.0, 0.0), InvalidParameter);
}

TEST_CASE("nakagami pdf integrates to one") {
  for (double m : {0.5, 1.0, 3.0, 10.0}) {
    CAPTURE(m);
    CHECK(std::abs(simpson(nakagami_pdf, m, 1.0, 12.0, 200000) - 1.0) < 1e-6);
  }
  CHECK(std::abs(simpson(nakagami_pdf, 3.0, 2.5, 20.0, 200000) - 1.0) < 1e-6);
}

TEST_CASE("power gain sampler moments") {
  Rng rng(11);
  const int n = 100000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_power_gain(3.0, 1.0, rng);
    CHECK_MESSAGE(g >= 0.0, "gain must be non-negative");
    s += g;
    s2 += g * g;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 0.02);
  CHECK(std::abs(var - 1.0 / 3.0) / (1.0 / 3.0) < 0.05);

  double a = 0.0;
  double a2 = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double g = sample_power_gain(200.0, 1.0, rng);
    a += g;
    a2 += g * g;
  }
  const double am = a / 20000;
  CHECK(std::sqrt(a2 / 20000 - am * am) / am < 0.1);
  CHECK(sample_power_gain(3.0, 1.0, std::uint64_t{9}) == sample_power_gain(3.0, 1.0, std::uint64_t{9}));
}

TEST_CASE("c2a sinr identities") {
  const ChannelParams p = unit_params();
  const std::vector<Transmitter> one{{{0.0, 0.0, 1.0}, 1.0}};
  const std::vector<double> g1{1.0};
  CHECK(sinr_c2a({0.0, 0.0, 0.0}, one, 0, p, g1) == doctest::Approx(1.0));

  ChannelParams quiet = p;
  quiet.noise_power = 1e-15;
  const std::vector<Transmitter> two{{{-10.0, 0.0, 0.0}, 1.0}, {{10.0, 0.0, 0.0}, 1.0}};
  const std::vector<double> g2{1.0, 1.0};
  CHECK(sinr_c2a({0.0, 5.0, 0.0}, two, 0, quiet, g2) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(sinr_c2a({0.0, 0.0, 1.0}, one, 0, p, g1), InvalidGeometry);
  CHECK_THROWS_AS(sinr_c2a({0.0, 0.0, 0.0}, one, 1, p, g1), InvalidParameter);
  CHECK_THROWS_AS(sinr_c2a({0.0, 0.0, 0.0}, one, 0, p, g2), InvalidParameter);
}

TEST_CASE("c2a sinr matches a term-by-term recomputation") {
  ChannelParams p = unit_params();
  p.noise_power = 1e-9;
  p.ref_gain = 1e-4;
  const std::vector<Transmitter> bs{{{30.0, 40.0, 30.0}, 20.0}, {{-120.0, 10.0, 30.0}, 20.0}, {{60.0, -200.0, 30.0}, 5.0}};
  const std::vector<double> g{0.8, 1.7, 0.3};
  const Vec3 rx{0.0, 0.0, 25.0};
  auto term = [&](int k) {
    const double dx = rx.x - bs[k].position.x;
    const double dy = rx.y - bs[k].position.y;
    const double dz = rx.z - bs[k].position.z;
    return bs[k].tx_power * g[k] * 1e-4 / std::pow(std::sqrt(dx * dx + dy * dy + dz * dz), 2.2);
  };
  const double expect = term(0) / (term(1) + term(2) + 1e-9);
  CHECK(sinr_c2a(rx, bs, 0, p, g) == doctest::Approx(expect).epsilon(1e-12));

  p.interference_factor = 0.25;
  CHECK(sinr_c2a(rx, bs, 0, p, g) == doctest::Approx(term(0) / (0.25 * (term(1) + term(2)) + 1e-9)).epsilon(1e-12));
}

TEST_CASE("c2a sinr monotonicity") {
  const ChannelParams p = unit_params();
  std::vector<Transmitter> bs{{{10.0, 0.0, 0.0}, 100.0}, {{-50.0, 0.0, 0.0}, 100.0}};
  std::vector<double> g{1.0, 1.0};
  double prev = INFINITY;
  for (double d = 5.0; d < 40.0; d += 5.0) {
    bs[0].position.x = d;
    const double s = sinr_c2a({0.0, 0.0, 0.0}, bs, 0, p, g);
    CHECK(s < prev);
    prev = s;
  }
  prev = INFINITY;
  for (double gi = 0.5; gi < 4.0; gi += 0.5) {
    g[1] = gi;
    const double s = sinr_c2a({0.0, 0.0, 0.0}, bs, 0, p, g);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("a2g sinr") {
  const ChannelParams p = unit_params();
  const AerialUnit single{{{0.0, 0.0, 1.0}}, 1.0};
  CHECK(sinr_a2g({0.0, 0.0, 0.0}, single, p) == doctest::Approx(1.0));

  const AerialUnit quad{{{0.0, 0.0, 5.0}, {0.0, 0.0, -5.0}, {5.0, 0.0, 0.0}, {0.0, 5.0, 0.0}}, 1.0};
  const AerialUnit one{{{0.0, 0.0, 5.0}}, 1.0};
  CHECK(sinr_a2g({0.0, 0.0, 0.0}, quad, p) == doctest::Approx(4.0 * sinr_a2g({0.0, 0.0, 0.0}, one, p)));

  CHECK_THROWS_AS(sinr_a2g({0.0, 0.0, 1.0}, single, p), InvalidGeometry);
  const AerialUnit bad{{{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}}, 1.0};
  CHECK_THROWS_AS(sinr_a2g({0.0, 0.0, 0.0}, bad, p), InvalidParameter);
}

TEST_CASE("a2g sinr over a tetrahedral swarm") {
  ChannelParams p = unit_params();
  p.noise_power = 2e-13;
  p.ref_gain_a2g = 4e-8;
  const DeploymentUnit u = make_config2({0.0, 0.0}, 300.0, 150.0);
  const AerialUnit swarm{u.positions, 5.0};
  const Vec3 ue{40.0, -70.0, 1.5};
  double sum = 0.0;
  double best_single = 0.0;
  for (const Vec3& q : u.positions) {
    const double dx = ue.x - q.x;
    const double dy = ue.y - q.y;
    const double dz = ue.z - q.z;
    const double gk = 4e-8 / (dx * dx + dy * dy + dz * dz);
    sum += gk;
    best_single = std::max(best_single, 5.0 / 2e-13 * gk);
  }
  const double s = sinr_a2g(ue, swarm, p);
  CHECK(s == doctest::Approx(5.0 / 2e-13 * sum).epsilon(1e-12));
  CHECK(s >= best_single);
}

TEST_CASE("los probability") {
  const double a = kPi / 18.0;
  CHECK(los_probability(a, a, 0.11) == doctest::Approx(1.0 / (1.0 + a)).epsilon(1e-12));
  CHECK(los_probability(a, a, 0.11) == doctest::Approx(0.8514).epsilon(1e-4));
  CHECK(los_probability(90.0, a, 0.11) > 0.5);
  CHECK(los_probability(13.0, a, 0.0) == doctest::Approx(1.0 / (1.0 + a)));
  double prev = 0.0;
  for (double th = 0.0; th <= 90.0; th += 5.0) {
    const double v = los_probability(th, a, 0.11);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK_THROWS_AS(los_probability(91.0, a, 0.11), InvalidParameter);
}

TEST_CASE("coverage radii") {
  CHECK(coverage_radius_single(1e4, 1.0, 1.0, 2.0, 50.0, 1.0) == doctest::Approx(86.6025).epsilon(1e-6));
  CHECK(coverage_radius_single(1e4, 1.0, 1.0, 2.0, 100.0, 1.0) == doctest::Approx(0.0));
  CHECK(coverage_radius_single(1e4, 1.0, 1.0, 2.0, 0.0, 1.0) == doctest::Approx(100.0));
  try {
    coverage_radius_single(1e4, 1.0, 1.0, 2.0, 150.0, 1.0);
    FAIL("expected InfeasibleAltitude");
  } catch (const InfeasibleAltitude& e) {
    CHECK(e.max_altitude() == doctest::Approx(100.0));
  }

  CHECK(coverage_radius_swarm(10.0, 300.0, 150.0) == doctest::Approx(116.066).epsilon(1e-6));
  CHECK(coverage_radius_swarm(0.0, 200.0, 100.0) == doctest::Approx(70.7107).epsilon(1e-6));
  CHECK(coverage_radius_swarm(5.0, 100.0 + 1e-9, 100.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(coverage_radius_swarm(5.0, 100.0, 100.0), InvalidParameter);
}

TEST_CASE("coverage radius round trip") {
  ChannelParams p = unit_params();
  p.noise_power = dbm_to_watts(-97.0);
  p.ref_gain_a2g = db_to_linear(-74.0);
  const double tx = dbm_to_watts(37.0);
  const double gamma = db_to_linear(11.3);
  for (double h : {50.0, 150.0, 200.0}) {
    const double r = coverage_radius_single(tx, gamma, p.noise_power, p.alpha_al, h, p.ref_gain_a2g);
    const AerialUnit u{{{0.0, 0.0, h}}, tx};
    CHECK(sinr_a2g({r, 0.0, 0.0}, u, p) == doctest::Approx(gamma).epsilon(1e-9));
  }
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(43.0) == doctest::Approx(19.953).epsilon(1e-4));
  CHECK(dbm_to_watts(37.0) == doctest::Approx(5.0119).epsilon(1e-4));
  CHECK(watts_to_dbm(dbm_to_watts(43.0)) == doctest::Approx(43.0).epsilon(1e-12));
  CHECK(linear_to_db(db_to_linear(11.3)) == doctest::Approx(11.3).epsilon(1e-12));
}

TEST_CASE("coverage map: dimensions, empty field, strong single station") {
  const ChannelParams p = unit_params();
  const Region r{95.0, 40.0};
  const CoverageMap empty = build_coverage_map(r, {}, {}, p, 10.0, 1.0, 1.0);
  CHECK(empty.nx == 10);
  CHECK(empty.ny == 4);
  CHECK(empty.covered_fraction() == 0.0);

  const std::vector<Transmitter> big{{{50.0, 20.0, 30.0}, 1e12}};
  const CoverageMap full = build_coverage_map(r, big, {}, p, 10.0, 1.0, 10.0);
  CHECK(full.covered_fraction() == 1.0);
  CHECK(full.covered_area() == doctest::Approx(400.0 * 10.0 / 10.0 * 10.0));
}

TEST_CASE("coverage map: hand-built cells against a scalar oracle") {
  ChannelParams p = unit_params();
  p.noise_power = 1e-6;
  const Region r{30.0, 10.0};
  const std::vector<Transmitter> bs{{{0.0, 5.0, 10.0}, 1.0}, {{30.0, 5.0, 10.0}, 2.0}};
  const AerialUnit abs{{{15.0, 5.0, 20.0}}, 0.1};
  const std::vector<AerialUnit> aerial{abs};
  const CoverageMap m = build_coverage_map(r, bs, aerial, p, 10.0, 0.0, 1.0);
  REQUIRE(m.nx == 3);
  REQUIRE(m.ny == 1);
  for (std::size_t ix = 0; ix < 3; ++ix) {
    const Vec3 ue{5.0 + 10.0 * ix, 5.0, 0.0};
    double pw[2];
    for (int k = 0; k < 2; ++k) {
      const double d2 = (ue - bs[k].position).squared_norm();
      pw[k] = bs[k].tx_power / std::pow(d2, 1.1);
    }
    const int s = pw[0] >= pw[1] ? 0 : 1;
    const double terr = pw[s] / (pw[1 - s] + 1e-6);
    const double pa = 0.1 / (ue - abs.positions[0]).squared_norm();
    const double expect = pa > pw[s] ? pa / 1e-6 : terr;
    CAPTURE(ix);
    CHECK(m.at(ix, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("coverage map: aerial units never lower coverage") {
  ChannelParams p = unit_params();
  p.noise_power = dbm_to_watts(-97.0);
  p.ref_gain = db_to_linear(-85.0);
  p.ref_gain_a2g = db_to_linear(-74.0);
  p.interference_factor = 0.001;
  const Region r{300.0, 300.0};
  const std::vector<Transmitter> bs{{{20.0, 30.0, 30.0}, 20.0}, {{250.0, 90.0, 30.0}, 20.0}};
  const std::vector<AerialUnit> aerial{{{{150.0, 250.0, 150.0}}, 5.0}};
  const CoverageMap before = build_coverage_map(r, bs, {}, p, 10.0, 25.0, db_to_linear(11.3));
  const CoverageMap after = build_coverage_map(r, bs, aerial, p, 10.0, 25.0, db_to_linear(11.3));
  CHECK(after.covered_fraction() >= before.covered_fraction());
  for (std::size_t i = 0; i < before.sinr.size(); ++i) CHECK(after.sinr[i] >= before.sinr[i]);
}

TEST_CASE("coverage map serialisation") {
  const ChannelParams p = unit_params();
  const std::vector<Transmitter> bs{{{5.0, 5.0, 3.0}, 50.0}};
  const CoverageMap m = build_coverage_map(Region{20.0, 30.0}, bs, {}, p, 10.0, 0.0, 1.0);
  std::istringstream in(m.to_csv());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# origin_x=", 0) == 0);
  CHECK(line.find("nx=2") != std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 1);
  }
  CHECK(rows == 3);
  const auto j = nlohmann::json::parse(m.summary_json());
  CHECK(j.at("covered_fraction").get<double>() == doctest::Approx(m.covered_fraction()));
  CHECK(m.percentile(0.0) <= m.percentile(50.0));
  CHECK(m.percentile(50.0) <= m.percentile(100.0));
}

TEST_CASE("sampled fading is deterministic and close to the mean-mode value") {
  ChannelParams p = unit_params();
  p.noise_power = 1e-3;
  const std::vector<Transmitter> bs{{{0.0, 0.0, 30.0}, 1.0}, {{80.0, 0.0, 30.0}, 1.0}};
  const Vec3 rx{10.0, 0.0, 25.0};
  const FadingSpec sampled{FadingMode::Sampled, 4000, 77};
  const double a = mean_sinr_c2a(rx, bs, p, sampled, 3);
  CHECK(a == mean_sinr_c2a(rx, bs, p, sampled, 3));
  CHECK(a > 0.0);
  CHECK(strongest_station(rx, bs, p) == 0);
}
