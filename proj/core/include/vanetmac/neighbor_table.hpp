#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vanetmac/mac_address.hpp"
#include "vanetmac/sim_time.hpp"

namespace vanetmac {

/// Highway coordinates: metres along the ring and lane index (0 or 1).
struct PositionRecord {
  double x = 0.0;
  int lane = 0;

  friend bool operator==(const PositionRecord&, const PositionRecord&) = default;
};

struct NeighborEntry {
  MacAddress mac;
  PositionRecord position;
  SimTime last_heard{0};

  friend bool operator==(const NeighborEntry&, const NeighborEntry&) = default;
};

/// Identity and position advertised by a received frame.
struct BeaconInfo {
  MacAddress mac;
  PositionRecord position;
};

/// Neighbours keyed by MAC, stored sorted by address so that table
/// construction can walk them in ascending order.
class NeighborTable {
 public:
  NeighborTable() = default;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const MacAddress& mac) const { return find(mac) != nullptr; }
  const NeighborEntry* find(const MacAddress& mac) const;

  /// Entries in ascending MAC order.
  std::span<const NeighborEntry> entries() const { return entries_; }

  /// In-place forms of update_neighbor_table / expire_neighbors.
  void upsert(const BeaconInfo& beacon, SimTime now);
  void expire(SimTime now, SimTime window);

  friend bool operator==(const NeighborTable&, const NeighborTable&) = default;

 private:
  std::vector<NeighborEntry> entries_;
};

/// Returns `nt` with the beacon's sender inserted or refreshed (last_heard = now).
/// Throws ProtocolError on an invalid position (negative/non-finite x, lane not 0/1).
NeighborTable update_neighbor_table(NeighborTable nt, const BeaconInfo& beacon, SimTime now);

/// Drops every entry with now - last_heard > window. Throws ProtocolError if window <= 0.
NeighborTable expire_neighbors(NeighborTable nt, SimTime now, SimTime window);

}  // namespace vanetmac
