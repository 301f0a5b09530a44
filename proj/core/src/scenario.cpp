#include "vanetmac/scenario.hpp"

#include <cmath>

#include "vanetmac/error.hpp"

namespace vanetmac {

namespace {

void require_positive(double v, const char* key) {
  if (!std::isfinite(v) || v <= 0.0) throw ConfigError(key, "must be positive");
}

void require_non_negative(double v, const char* key) {
  if (!std::isfinite(v) || v < 0.0) throw ConfigError(key, "must be zero or positive");
}

}  // namespace

void ScenarioConfig::validate() const {
  require_positive(highway_length, "highway_length");
  if (lanes != 2) throw ConfigError("lanes", "only the two-lane, two-direction highway is modelled");
  require_non_negative(speed, "speed");
  require_positive(range, "range");
  require_positive(lane_gap, "lane_gap");
  if (n_vehicles < 1) throw ConfigError("n_vehicles", "must be at least 1");
  if (slots_per_frame < 1) throw ConfigError("slots_per_frame", "must be at least 1");
  require_positive(slot_duration, "slot_duration");
  require_positive(beacon_interval, "beacon_interval");
  require_positive(sim_duration, "sim_duration");
  require_positive(warmup, "warmup");
  if (warmup >= sim_duration) throw ConfigError("warmup", "must be shorter than sim_duration");
}

ProtocolConfig ScenarioConfig::protocol_config() const {
  ProtocolConfig cfg;
  cfg.slot_duration = from_seconds(slot_duration);
  cfg.data_airtime = cfg.slot_duration;
  cfg.slots_per_frame = slots_per_frame;
  return cfg;
}

}  // namespace vanetmac
