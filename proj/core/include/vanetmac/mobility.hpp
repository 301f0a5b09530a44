#pragma once

#include "vanetmac/mac_address.hpp"

namespace vanetmac {

/// Ring highway: x wraps modulo `length`; lanes are `lane_gap` metres apart.
struct HighwayGeometry {
  double length = 2000.0;
  double lane_gap = 10.0;
};

/// Lane 0 travels eastbound (+1), lane 1 westbound (-1).
struct VehicleBody {
  MacAddress mac;
  double x = 0.0;
  int lane = 0;
  int direction = +1;
};

constexpr int lane_direction(int lane) { return lane == 0 ? +1 : -1; }

/// (x + direction * speed * dt) wrapped into [0, length).
double advance_position(double x, int direction, double speed, double dt, double length);

/// Euclidean distance using the shorter way round the ring.
double distance(const VehicleBody& a, const VehicleBody& b, const HighwayGeometry& geo);

/// Closed boundary: a vehicle exactly `range` metres away is in range.
inline bool in_range(double d, double range) { return d <= range; }

inline bool in_range(const VehicleBody& a, const VehicleBody& b, const HighwayGeometry& geo, double range) {
  return in_range(distance(a, b, geo), range);
}

}  // namespace vanetmac
