#pragma once

#include <cstdint>

#include "vanetmac/channel.hpp"
#include "vanetmac/mobility.hpp"
#include "vanetmac/protocol.hpp"

namespace vanetmac {

/// Highway scenario. Defaults: 2 km two-lane ring, 120 km/h, 300 m range,
/// 10 slots of 2.5 ms per frame, one message per vehicle every 100 ms.
struct ScenarioConfig {
  double highway_length = 2000.0;
  int lanes = 2;
  double speed = 120.0 / 3.6;
  double range = 300.0;
  double lane_gap = 10.0;
  int n_vehicles = 67;
  int slots_per_frame = 10;
  double slot_duration = 0.0025;
  double beacon_interval = 0.1;
  double sim_duration = 60.0;
  double warmup = 0.25;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  HighwayGeometry geometry() const { return {highway_length, lane_gap}; }
  /// Protocol timing derived from the slot layout; other fields keep their defaults.
  ProtocolConfig protocol_config() const;
  ChannelModel channel() const { return ChannelModel::calibrated(range); }
};

}  // namespace vanetmac
