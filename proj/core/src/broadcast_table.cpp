#include "vanetmac/broadcast_table.hpp"

#include <algorithm>

#include "vanetmac/error.hpp"

namespace vanetmac {

BroadcastTable::BroadcastTable(std::vector<BroadcastRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ProtocolError("broadcast table needs an initiator row");
  for (std::size_t i = 2; i < rows_.size(); ++i) {
    if (!(rows_[i - 1].mac < rows_[i].mac)) {
      throw ProtocolError("broadcast table rows after the initiator must be strictly ascending");
    }
  }
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].mac == rows_[0].mac) throw ProtocolError("initiator listed twice in broadcast table");
  }
}

std::optional<std::size_t> BroadcastTable::row_index(const MacAddress& mac) const {
  if (rows_.front().mac == mac) return 0;
  auto it = std::lower_bound(rows_.begin() + 1, rows_.end(), mac,
                             [](const BroadcastRow& r, const MacAddress& m) { return r.mac < m; });
  if (it == rows_.end() || it->mac != mac) return std::nullopt;
  return static_cast<std::size_t>(it - rows_.begin());
}

std::size_t BroadcastTable::wts_count() const {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [](const BroadcastRow& r) { return r.wts; }));
}

BroadcastTable build_ibt(const MacAddress& initiator, const NeighborTable& nt) {
  if (nt.contains(initiator)) throw ProtocolError("initiator found in its own neighbor table");
  std::vector<BroadcastRow> rows;
  rows.reserve(nt.size() + 1);
  rows.push_back({initiator, false});
  for (const auto& e : nt.entries()) rows.push_back({e.mac, false});
  return BroadcastTable(BroadcastTable::Unchecked{}, std::move(rows));
}

BroadcastTable mark_wts(BroadcastTable bt, const MacAddress& responder) {
  const auto idx = bt.row_index(responder);
  if (!idx) throw ProtocolError("WTS from a vehicle not listed in the broadcast table");
  bt.rows_[*idx].wts = true;
  return bt;
}

BroadcastTable admit_row(BroadcastTable bt, const MacAddress& mac) {
  if (bt.contains(mac)) return bt;
  auto it = std::lower_bound(bt.rows_.begin() + 1, bt.rows_.end(), mac,
                             [](const BroadcastRow& r, const MacAddress& m) { return r.mac < m; });
  bt.rows_.insert(it, BroadcastRow{mac, false});
  return bt;
}

std::vector<MacAddress> transmission_order(const BroadcastTable& bt) {
  std::vector<MacAddress> order;
  for (const auto& r : bt.rows()) {
    if (r.wts) order.push_back(r.mac);
  }
  return order;
}

std::optional<MacAddress> next_initiator(const BroadcastTable& bt) {
  for (const auto& r : bt.rows()) {
    if (!r.wts) return r.mac;
  }
  return std::nullopt;
}

}  // namespace vanetmac
