#pragma once

#include <cstdint>
#include <vector>

#include "vanetmac/protocol.hpp"
#include "vanetmac/random.hpp"

namespace vanetmac {

/// A fresh vehicle: JOINING, empty tables, empty queue.
/// Throws ConfigError if `cfg` is invalid.
NodeState create_node(ProtocolKind kind, const MacAddress& mac, const ProtocolConfig& cfg,
                      std::int64_t node_index = 0);

/// Arms the join-listen timer of a freshly created node.
void activate_node(NodeState& node, SimTime now, std::vector<NodeAction>& out);

struct Transition {
  NodeState node;
  std::vector<NodeAction> actions;
};

/// Pure transition: the same (node, input, now, rng state) always yields the same result.
Transition handle_event(NodeState node, const NodeInput& in, SimTime now, DeterministicRng& rng);

/// In-place form used by the simulator; appends to `out`.
void step(NodeState& node, const NodeInput& in, SimTime now, DeterministicRng& rng, std::vector<NodeAction>& out);

/// Delay before a listed responder answers an IBT: row_index x SIFS.
/// Throws ProtocolError for row 0 (the initiator never replies).
SimTime wts_reply_delay(std::int64_t row_index, SimTime sifs);

/// DIFS + U x backoff_slot with U uniform in [0, cw). Throws ProtocolError if cw < 1.
SimTime contention_backoff(DeterministicRng& rng, int cw, SimTime backoff_slot, SimTime difs);

/// Baseline TDMA slot: node_index mod slots_per_frame. Throws ProtocolError if slots_per_frame < 1.
int baseline_slot_assign(std::int64_t node_index, int slots_per_frame);

}  // namespace vanetmac
