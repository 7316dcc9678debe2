#pragma once

#include <cstdint>
#include <vector>

#include "uavcov/core.hpp"

namespace uavcov {

// Axis-aligned rectangular area of interest.
struct Region {
  double width = 0.0;
  double height = 0.0;
  Vec2 origin{};

  double area() const { return width * height; }
  double perimeter() const { return 2.0 * (width + height); }
  Vec2 center() const { return {origin.x + 0.5 * width, origin.y + 0.5 * height}; }
  bool contains(Vec2 p) const {
    return p.x >= origin.x && p.x <= origin.x + width && p.y >= origin.y &&
           p.y <= origin.y + height;
  }
  // Distance from p to the closed rectangle (0 inside).
  double distance_to(Vec2 p) const;
  void validate() const;
};

struct PointSet {
  std::vector<Vec2> points;
  double generator_density = 0.0;  // points / m^2

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Upper/lower fleet-size estimates for covering a region with disks of radius R.
struct CoveringBounds {
  double lower = 0.0;
  double upper = 0.0;
  long lower_int = 0;  // ceil(lower)
  long upper_int = 0;  // floor(upper)
};

// Homogeneous Poisson field on `region` (intensity in points/m^2).
PointSet sample_ppp(const Region& region, double density, std::uint64_t seed);
PointSet sample_ppp(const Region& region, double density, Rng& rng);

// Type-I hard-core thinning: every point whose nearest neighbour in the
// input lies strictly closer than `min_distance` is removed.
PointSet matern_thin(const PointSet& points, double min_distance);

// Returns indices of the retained points instead of copying them.
std::vector<std::size_t> matern_survivors(const std::vector<Vec2>& points, double min_distance);

// Area of region ⊕ disk(r) for the rectangle: A + P r + π r².
double minkowski_area_rect_disk(const Region& region, double r);

CoveringBounds covering_bounds(const Region& region, double radius);

// Hexagonal-lattice disk covering of the region (pitch √3·R). Only centres whose
// disk reaches the region are returned.
PointSet hex_cover(const Region& region, double radius);

double min_pairwise_distance(const std::vector<Vec2>& points);

}  // namespace uavcov
