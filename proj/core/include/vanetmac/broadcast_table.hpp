#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vanetmac/mac_address.hpp"
#include "vanetmac/neighbor_table.hpp"

namespace vanetmac {

struct BroadcastRow {
  MacAddress mac;
  bool wts = false;

  friend bool operator==(const BroadcastRow&, const BroadcastRow&) = default;
};

/// Reservation schedule for one round. Row 0 is the initiator; the remaining
/// rows are strictly ascending by address. A row's `wts` flag is set once that
/// vehicle has asked to transmit in the round.
class BroadcastTable {
 public:
  /// Validates the row invariants, throwing ProtocolError on violation.
  explicit BroadcastTable(std::vector<BroadcastRow> rows);

  std::span<const BroadcastRow> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const MacAddress& initiator() const { return rows_.front().mac; }

  std::optional<std::size_t> row_index(const MacAddress& mac) const;
  bool contains(const MacAddress& mac) const { return row_index(mac).has_value(); }
  std::size_t wts_count() const;

  friend bool operator==(const BroadcastTable&, const BroadcastTable&) = default;

 private:
  struct Unchecked {};
  BroadcastTable(Unchecked, std::vector<BroadcastRow> rows) : rows_(std::move(rows)) {}

  friend BroadcastTable build_ibt(const MacAddress&, const NeighborTable&);
  friend BroadcastTable mark_wts(BroadcastTable, const MacAddress&);
  friend BroadcastTable admit_row(BroadcastTable, const MacAddress&);

  std::vector<BroadcastRow> rows_;
};

/// Initial table: the initiator first, then every neighbour in ascending order,
/// all with wts = 0. Throws ProtocolError if the initiator is in `nt`.
BroadcastTable build_ibt(const MacAddress& initiator, const NeighborTable& nt);

/// Sets the responder's wts flag. Idempotent. Throws ProtocolError if absent.
BroadcastTable mark_wts(BroadcastTable bt, const MacAddress& responder);

/// Inserts an unlisted vehicle at its ascending position with wts = 0.
/// No-op if already present.
BroadcastTable admit_row(BroadcastTable bt, const MacAddress& mac);

/// Vehicles with wts = 1, in table order.
std::vector<MacAddress> transmission_order(const BroadcastTable& bt);

/// First row in table order with wts = 0; empty when every row has asked to send.
std::optional<MacAddress> next_initiator(const BroadcastTable& bt);

}  // namespace vanetmac
