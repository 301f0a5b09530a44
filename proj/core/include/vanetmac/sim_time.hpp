#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace vanetmac {

/// Simulation clock: integer microseconds since the start of a run. Used for
/// both instants and durations so that traces are bit-exact.
using SimTime = std::chrono::microseconds;

inline SimTime from_seconds(double seconds) {
  return SimTime(static_cast<std::int64_t>(std::llround(seconds * 1e6)));
}

constexpr double to_seconds(SimTime t) { return static_cast<double>(t.count()) * 1e-6; }

}  // namespace vanetmac
