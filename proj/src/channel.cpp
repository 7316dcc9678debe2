#include "uavcov/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace uavcov {

void ChannelParams::validate() const {
  if (!(m >= 0.5)) throw InvalidParameter("Nakagami shape m must be >= 0.5");
  if (!(omega > 0.0)) throw InvalidParameter("average fading power omega must be positive");
  if (!(alpha_b > 2.0)) throw InvalidParameter("terrestrial path-loss exponent must exceed 2");
  if (!(alpha_al > 0.0) || !(alpha_an > 0.0)) throw InvalidParameter("aerial path-loss exponents must be positive");
  if (!(noise_power > 0.0)) throw InvalidParameter("noise power must be positive");
  if (!(ref_gain > 0.0) || !(ref_gain_a2g > 0.0)) throw InvalidParameter("reference gains must be positive");
  if (!(interference_factor >= 0.0 && interference_factor <= 1.0)) {
    throw InvalidParameter("interference factor must lie in [0, 1]");
  }
}

double nakagami_pdf(double x, double m, double omega) {
  if (!(x >= 0.0) || !(m >= 0.5) || !(omega > 0.0)) {
    throw InvalidParameter("nakagami_pdf requires x >= 0, m >= 0.5, omega > 0");
  }
  if (x == 0.0) return m == 0.5 ? 2.0 * std::sqrt(0.5 / omega) / std::tgamma(0.5) : 0.0;
  const double log_pdf = std::log(2.0) + m * std::log(m) + (2.0 * m - 1.0) * std::log(x) -
                         m * x * x / omega - std::lgamma(m) - m * std::log(omega);
  return std::exp(log_pdf);
}

double sample_power_gain(double m, double omega, Rng& rng) {
  if (!(m >= 0.5) || !(omega > 0.0)) throw InvalidParameter("fading requires m >= 0.5, omega > 0");
  std::gamma_distribution<double> gamma(m, omega / m);
  return gamma(rng);
}

double sample_power_gain(double m, double omega, std::uint64_t seed) {
  Rng rng(seed);
  return sample_power_gain(m, omega, rng);
}

namespace {

double received_c2a(const Vec3& rx, const Transmitter& t, const ChannelParams& p, double fading) {
  const double d = distance(rx, t.position);
  if (!(d > 0.0)) throw InvalidGeometry("receiver coincides with a transmitter");
  return t.tx_power * fading * p.ref_gain * std::pow(d, -p.alpha_b);
}

double unit_gain_sum(const Vec3& ue, const AerialUnit& unit, const ChannelParams& p) {
  double sum = 0.0;
  for (const Vec3& pos : unit.positions) {
    const double d = distance(ue, pos);
    if (!(d > 0.0)) throw InvalidGeometry("aerial station coincides with the receiver");
    sum += p.ref_gain_a2g * std::pow(d, -p.alpha_al);
  }
  return sum;
}

}  // namespace

double sinr_c2a(const Vec3& rx, std::span<const Transmitter> stations, std::size_t serving,
                const ChannelParams& params, std::span<const double> fading) {
  if (serving >= stations.size()) throw InvalidParameter("serving index out of range");
  if (fading.size() != stations.size()) throw InvalidParameter("one fading gain per transmitter required");
  const double signal = received_c2a(rx, stations[serving], params, fading[serving]);
  double interference = 0.0;
  for (std::size_t k = 0; k < stations.size(); ++k) {
    if (k == serving) continue;
    interference += received_c2a(rx, stations[k], params, fading[k]);
  }
  return signal / (params.interference_factor * interference + params.noise_power);
}

double sinr_a2g(const Vec3& ue, const AerialUnit& unit, const ChannelParams& params) {
  if (unit.positions.size() != 1 && unit.positions.size() != 4) {
    throw InvalidParameter("an aerial unit has 1 (single) or 4 (swarm) stations");
  }
  return unit.tx_power / params.noise_power * unit_gain_sum(ue, unit, params);
}

double los_probability(double elevation_deg, double env_a, double env_b) {
  if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0)) {
    throw InvalidParameter("elevation must lie in [0, 90] degrees");
  }
  return 1.0 / (1.0 + env_a * std::exp(-env_b * (elevation_deg - env_a)));
}

double coverage_radius_single(double tx_power, double gamma, double noise, double alpha,
                              double altitude, double ref_gain) {
  if (!(tx_power > 0.0) || !(gamma > 0.0) || !(noise > 0.0) || !(alpha > 0.0) || !(ref_gain > 0.0)) {
    throw InvalidParameter("coverage radius inputs must be positive");
  }
  const double slant_sq = std::pow(ref_gain * tx_power / (gamma * noise), 2.0 / alpha);
  const double bracket = slant_sq - altitude * altitude;
  if (bracket < 0.0) {
    throw InfeasibleAltitude("altitude exceeds the maximum slant range of the station",
                             std::sqrt(slant_sq));
  }
  return std::sqrt(bracket);
}

double coverage_radius_swarm(double r1, double apex_altitude, double base_altitude) {
  if (!(apex_altitude > base_altitude)) {
    throw InvalidParameter("swarm apex altitude must exceed the base altitude");
  }
  return r1 + std::sqrt(2.0) / 2.0 * (apex_altitude - base_altitude);
}

Vec2 CoverageMap::cell_center(std::size_t ix, std::size_t iy) const {
  return {origin.x + (static_cast<double>(ix) + 0.5) * resolution,
          origin.y + (static_cast<double>(iy) + 0.5) * resolution};
}

double CoverageMap::covered_fraction() const {
  if (sinr.empty()) return 0.0;
  const auto covered = std::count_if(sinr.begin(), sinr.end(), [&](double s) { return s >= threshold; });
  return static_cast<double>(covered) / static_cast<double>(sinr.size());
}

double CoverageMap::covered_area() const {
  const auto covered = std::count_if(sinr.begin(), sinr.end(), [&](double s) { return s >= threshold; });
  return static_cast<double>(covered) * resolution * resolution;
}

double CoverageMap::percentile(double p) const {
  if (sinr.empty()) return 0.0;
  std::vector<double> sorted = sinr;
  std::sort(sorted.begin(), sorted.end());
  const double rank = std::ceil(std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size()));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return sorted[std::min(idx, sorted.size() - 1)];
}

std::string CoverageMap::to_csv() const {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", origin.x);
  os << "# origin_x=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", origin.y);
  os << ",origin_y=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", resolution);
  os << ",resolution=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", threshold);
  os << ",threshold=" << buf << ",nx=" << nx << ",ny=" << ny << '\n';
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      std::snprintf(buf, sizeof buf, "%.9g", at(ix, iy));
      if (ix) os << ',';
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string CoverageMap::summary_json() const {
  nlohmann::ordered_json j;
  j["covered_fraction"] = covered_fraction();
  j["covered_area_m2"] = covered_area();
  j["threshold_linear"] = threshold;
  j["threshold_db"] = linear_to_db(threshold);
  j["resolution_m"] = resolution;
  j["nx"] = nx;
  j["ny"] = ny;
  nlohmann::ordered_json pct;
  for (double p : {5.0, 10.0, 25.0, 50.0, 75.0, 90.0, 95.0}) {
    const double v = percentile(p);
    pct[std::to_string(static_cast<int>(p))] = v > 0.0 ? linear_to_db(v) : -300.0;
  }
  j["sinr_percentiles_db"] = pct;
  return j.dump(2);
}

std::size_t strongest_station(const Vec3& rx, std::span<const Transmitter> stations,
                              const ChannelParams& params) {
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t k = 0; k < stations.size(); ++k) {
    const double pw = received_c2a(rx, stations[k], params, params.omega);
    if (pw > best_power) {
      best_power = pw;
      best = k;
    }
  }
  return best;
}

double mean_sinr_c2a(const Vec3& rx, std::span<const Transmitter> stations,
                     const ChannelParams& params, const FadingSpec& fading, std::uint64_t stream) {
  if (stations.empty()) return 0.0;
  const std::size_t serving = strongest_station(rx, stations, params);
  std::vector<double> gains(stations.size(), params.omega);
  if (fading.mode == FadingMode::Mean) return sinr_c2a(rx, stations, serving, params, gains);
  if (fading.draws < 1) throw InvalidParameter("sampled fading needs at least one draw");
  Rng rng(mix_seed(fading.seed, stream));
  double acc = 0.0;
  for (int d = 0; d < fading.draws; ++d) {
    for (double& g : gains) g = sample_power_gain(params.m, params.omega, rng);
    acc += sinr_c2a(rx, stations, serving, params, gains);
  }
  return acc / fading.draws;
}

CoverageMap build_coverage_map(const Region& region, std::span<const Transmitter> terrestrial,
                               std::span<const AerialUnit> aerial, const ChannelParams& params,
                               double resolution, double rx_height, double threshold,
                               const FadingSpec& fading) {
  if (!(resolution > 0.0)) throw InvalidParameter("grid resolution must be positive");
  CoverageMap map;
  map.origin = region.origin;
  map.resolution = resolution;
  map.threshold = threshold;
  map.nx = static_cast<std::size_t>(std::ceil(region.width / resolution - 1e-9));
  map.ny = static_cast<std::size_t>(std::ceil(region.height / resolution - 1e-9));
  map.sinr.assign(map.nx * map.ny, 0.0);
  if (terrestrial.empty() && aerial.empty()) return map;

  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const Vec3 rx = lift(map.cell_center(ix, iy), rx_height);
      double best_terrestrial = 0.0;
      if (!terrestrial.empty()) {
        const std::size_t s = strongest_station(rx, terrestrial, params);
        best_terrestrial = received_c2a(rx, terrestrial[s], params, params.omega);
      }
      double best_aerial = 0.0;
      const AerialUnit* server = nullptr;
      for (const AerialUnit& u : aerial) {
        const double pw = u.tx_power * unit_gain_sum(rx, u, params);
        if (pw > best_aerial) {
          best_aerial = pw;
          server = &u;
        }
      }
      double value;
      if (server != nullptr && best_aerial > best_terrestrial) {
        value = sinr_a2g(rx, *server, params);
      } else {
        value = mean_sinr_c2a(rx, terrestrial, params, fading, iy * map.nx + ix);
      }
      map.sinr[iy * map.nx + ix] = value;
    }
  }
  return map;
}

}  // namespace uavcov
