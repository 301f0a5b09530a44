#include "vanetmac/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace vanetmac {

double advance_position(double x, int direction, double speed, double dt, double length) {
  double next = std::fmod(x + direction * speed * dt, length);
  if (next < 0.0) next += length;
  // fmod of a value a hair below zero can round back up to `length`.
  if (next >= length) next = 0.0;
  return next;
}

double distance(const VehicleBody& a, const VehicleBody& b, const HighwayGeometry& geo) {
  const double raw = std::abs(a.x - b.x);
  const double dx = std::min(raw, geo.length - raw);
  const double dy = geo.lane_gap * std::abs(a.lane - b.lane);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace vanetmac
