#include "vanetmac/neighbor_table.hpp"

#include <algorithm>
#include <cmath>

#include "vanetmac/error.hpp"

namespace vanetmac {

namespace {

auto lower(std::vector<NeighborEntry>& v, const MacAddress& mac) {
  return std::lower_bound(v.begin(), v.end(), mac,
                          [](const NeighborEntry& e, const MacAddress& m) { return e.mac < m; });
}

}  // namespace

const NeighborEntry* NeighborTable::find(const MacAddress& mac) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), mac,
                             [](const NeighborEntry& e, const MacAddress& m) { return e.mac < m; });
  if (it == entries_.end() || it->mac != mac) return nullptr;
  return &*it;
}

void NeighborTable::upsert(const BeaconInfo& beacon, SimTime now) {
  const auto& p = beacon.position;
  if (!std::isfinite(p.x) || p.x < 0.0 || (p.lane != 0 && p.lane != 1)) {
    throw ProtocolError("beacon carries an invalid position");
  }
  auto it = lower(entries_, beacon.mac);
  if (it != entries_.end() && it->mac == beacon.mac) {
    it->position = p;
    it->last_heard = now;
  } else {
    entries_.insert(it, NeighborEntry{beacon.mac, p, now});
  }
}

void NeighborTable::expire(SimTime now, SimTime window) {
  if (window <= SimTime::zero()) throw ProtocolError("staleness window must be positive");
  std::erase_if(entries_, [&](const NeighborEntry& e) { return now - e.last_heard > window; });
}

NeighborTable update_neighbor_table(NeighborTable nt, const BeaconInfo& beacon, SimTime now) {
  nt.upsert(beacon, now);
  return nt;
}

NeighborTable expire_neighbors(NeighborTable nt, SimTime now, SimTime window) {
  nt.expire(now, window);
  return nt;
}

}  // namespace vanetmac
