#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavcov/core.hpp"
#include "uavcov/geometry.hpp"

namespace uavcov {

// Propagation constants. Internal units are watts and metres.
//
// `ref_gain` is the path gain at 1 m on terrestrial (C2A) links and
// `ref_gain_a2g` the one on aerial LoS links; with both equal to 1 and
// noise_power = 1 the radii reduce to the noise-free closed forms.
// `interference_factor` scales the co-channel interference sum (1 = plain sum).
struct ChannelParams {
  double m = 3.0;
  double omega = 1.0;
  double alpha_b = 2.2;
  double alpha_al = 2.0;
  double alpha_an = 2.5;
  double env_a = kPi / 18.0;
  double env_b = 0.11;
  double noise_power = 1.0;
  double ref_gain = 1.0;
  double ref_gain_a2g = 1.0;
  double interference_factor = 1.0;

  void validate() const;
};

enum class TransmitterKind { Terrestrial, Aerial };

struct Transmitter {
  Vec3 position{};
  double tx_power = 1.0;
  TransmitterKind kind = TransmitterKind::Terrestrial;
};

// A deployed aerial unit as seen by the channel: one station (Config 1) or the
// four CoMP members of a swarm (Config 2).
struct AerialUnit {
  std::vector<Vec3> positions;
  double tx_power = 1.0;
};

enum class FadingMode { Mean, Sampled };

struct FadingSpec {
  FadingMode mode = FadingMode::Mean;
  int draws = 100;
  std::uint64_t seed = 0;
};

double nakagami_pdf(double x, double m, double omega);

// Power gain |h|^2 ~ Gamma(shape m, scale Ω/m).
double sample_power_gain(double m, double omega, Rng& rng);
double sample_power_gain(double m, double omega, std::uint64_t seed);

// Downlink SINR at a low-altitude receiver from terrestrial stations.
// `fading` holds one power gain per transmitter.
double sinr_c2a(const Vec3& rx, std::span<const Transmitter> stations, std::size_t serving,
                const ChannelParams& params, std::span<const double> fading);

// CoMP power sum from an aerial unit; interference is not modelled.
double sinr_a2g(const Vec3& ue, const AerialUnit& unit, const ChannelParams& params);

// Elevation-angle LoS sigmoid 1 / (1 + a exp(-b (θ - a))), θ in degrees.
double los_probability(double elevation_deg, double env_a, double env_b);

// Horizontal radius at which a single aerial station at altitude h delivers
// exactly gamma. Throws InfeasibleAltitude when no such radius exists.
double coverage_radius_single(double tx_power, double gamma, double noise, double alpha,
                              double altitude, double ref_gain);

double coverage_radius_swarm(double r1, double apex_altitude, double base_altitude);

struct CoverageMap {
  Vec2 origin{};
  double resolution = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double threshold = 1.0;   // linear SINR
  std::vector<double> sinr; // row-major, row j = y index

  double at(std::size_t ix, std::size_t iy) const { return sinr[iy * nx + ix]; }
  Vec2 cell_center(std::size_t ix, std::size_t iy) const;
  double covered_fraction() const;
  double covered_area() const;
  // p in [0, 100]; nearest-rank on the linear SINR values.
  double percentile(double p) const;

  std::string to_csv() const;
  std::string summary_json() const;
};

CoverageMap build_coverage_map(const Region& region, std::span<const Transmitter> terrestrial,
                               std::span<const AerialUnit> aerial, const ChannelParams& params,
                               double resolution, double rx_height, double threshold,
                               const FadingSpec& fading = {});

// Index of the terrestrial station with the strongest mean received power at rx.
std::size_t strongest_station(const Vec3& rx, std::span<const Transmitter> stations,
                              const ChannelParams& params);

// Mean-fading (g = Ω) or sampled-average C2A SINR at rx with the strongest server.
double mean_sinr_c2a(const Vec3& rx, std::span<const Transmitter> stations,
                     const ChannelParams& params, const FadingSpec& fading,
                     std::uint64_t stream = 0);

}  // namespace uavcov
