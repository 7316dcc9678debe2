#include "uavcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavcov {

double Region::distance_to(Vec2 p) const {
  const double dx = std::max({origin.x - p.x, 0.0, p.x - (origin.x + width)});
  const double dy = std::max({origin.y - p.y, 0.0, p.y - (origin.y + height)});
  return std::hypot(dx, dy);
}

void Region::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidParameter("region width and height must be positive");
  }
}

PointSet sample_ppp(const Region& region, double density, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ppp(region, density, rng);
}

PointSet sample_ppp(const Region& region, double density, Rng& rng) {
  if (!(density >= 0.0)) throw InvalidParameter("point-process density must be non-negative");
  PointSet out;
  out.generator_density = density;
  const double mean = density * region.area();
  if (mean <= 0.0) return out;
  std::poisson_distribution<long> count(mean);
  const long n = count(rng);
  std::uniform_real_distribution<double> ux(region.origin.x, region.origin.x + region.width);
  std::uniform_real_distribution<double> uy(region.origin.y, region.origin.y + region.height);
  out.points.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.points.push_back({x, y});
  }
  return out;
}

std::vector<std::size_t> matern_survivors(const std::vector<Vec2>& points, double min_distance) {
  if (!(min_distance >= 0.0)) throw InvalidParameter("exclusion radius must be non-negative");
  const std::size_t n = points.size();
  std::vector<bool> doomed(n, false);
  const double d2 = min_distance * min_distance;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      if (dx * dx + dy * dy < d2) {
        doomed[i] = true;
        doomed[j] = true;
      }
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (!doomed[i]) keep.push_back(i);
  }
  return keep;
}

PointSet matern_thin(const PointSet& points, double min_distance) {
  PointSet out;
  out.generator_density = points.generator_density;
  for (std::size_t i : matern_survivors(points.points, min_distance)) {
    out.points.push_back(points.points[i]);
  }
  return out;
}

double minkowski_area_rect_disk(const Region& region, double r) {
  if (!(r >= 0.0)) throw InvalidParameter("dilation radius must be non-negative");
  return region.area() + region.perimeter() * r + kPi * r * r;
}

CoveringBounds covering_bounds(const Region& region, double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("coverage radius must be positive");
  CoveringBounds b;
  b.lower = region.area() / (kPi * radius * radius);
  const double half = 0.5 * radius;
  b.upper = minkowski_area_rect_disk(region, half) / (kPi * half * half);
  // Guard the ceiling against 1 + 1e-16 style representation noise.
  b.lower_int = static_cast<long>(std::ceil(b.lower - 1e-12));
  b.upper_int = static_cast<long>(std::floor(b.upper + 1e-12));
  return b;
}

PointSet hex_cover(const Region& region, double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("coverage radius must be positive");
  PointSet out;
  const double half_diag = 0.5 * std::hypot(region.width, region.height);
  if (half_diag <= radius * (1.0 + 1e-12)) {
    out.points.push_back(region.center());
    return out;
  }
  // Rows 1.5R apart, centres √3R apart within a row, odd rows shifted by half
  // a pitch. The lattice is anchored at the region centre and extended by one
  // extra row/column on each side; disks that miss the region are dropped.
  const double pitch = std::sqrt(3.0) * radius;
  const double row_gap = 1.5 * radius;
  const Vec2 c = region.center();
  const long rows = static_cast<long>(std::ceil(0.5 * region.height / row_gap)) + 1;
  const long cols = static_cast<long>(std::ceil(0.5 * region.width / pitch)) + 1;
  for (long j = -rows; j <= rows; ++j) {
    const double y = c.y + static_cast<double>(j) * row_gap;
    const double shift = (std::abs(j) % 2 == 1) ? 0.5 * pitch : 0.0;
    for (long i = -cols - 1; i <= cols; ++i) {
      const Vec2 p{c.x + static_cast<double>(i) * pitch + shift, y};
      if (region.distance_to(p) <= radius) out.points.push_back(p);
    }
  }
  return out;
}

double min_pairwise_distance(const std::vector<Vec2>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, distance(points[i], points[j]));
    }
  }
  return best;
}

}  // namespace uavcov
