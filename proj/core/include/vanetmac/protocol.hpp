#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

#include "vanetmac/broadcast_table.hpp"
#include "vanetmac/mac_address.hpp"
#include "vanetmac/neighbor_table.hpp"
#include "vanetmac/sim_time.hpp"

namespace vanetmac {

enum class ProtocolKind : std::uint8_t { CfMac, IMac, BaselineTdma };

/// "CF_MAC", "I_MAC", "BASELINE_TDMA".
std::string_view to_string(ProtocolKind kind);
/// Inverse of to_string; throws ParseError on an unknown name.
ProtocolKind parse_protocol_kind(std::string_view name);

/// MAC timing and sizing. Defaults are the 802.11p interframe spaces and the
/// 2.5 ms / 10-slot TDMA frame.
struct ProtocolConfig {
  SimTime slot_duration{2500};
  int slots_per_frame = 10;
  SimTime sifs{32};
  SimTime difs{58};
  SimTime backoff_slot{13};
  int contention_window = 16;
  std::size_t queue_capacity = 16;
  SimTime ibt_airtime{200};
  SimTime wts_airtime{16};
  SimTime data_airtime{2500};
  /// How long a new vehicle listens before it may initiate on its own.
  SimTime join_listen{50000};
  SimTime neighbor_window{1000000};

  SimTime frame_duration() const { return slot_duration * slots_per_frame; }

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

using PayloadId = std::uint64_t;

enum class MessageKind : std::uint8_t { Beacon, Ibt, Wts, Data };
std::string_view to_string(MessageKind kind);

/// How the sender came to hold the slot it transmits in. Acquisition frames
/// (IBT, WTS) compete for the channel; Reserved frames follow an established
/// broadcast table; FixedAssignment frames use the baseline's static slot.
enum class SlotClaim : std::uint8_t { Acquisition, Reserved, FixedAssignment };

struct ProtocolMessage {
  MessageKind kind = MessageKind::Beacon;
  MacAddress sender;
  /// Sender position at transmission start; stamped by the simulator.
  PositionRecord position;
  /// IBT and DATA: the round's table (initial or final).
  std::shared_ptr<const BroadcastTable> table;
  /// IBT and DATA: start of the round's first DATA slot.
  SimTime round_start{0};
  /// WTS: the initiator being answered.
  MacAddress target;
  /// DATA: application payload, absent for a schedule-only frame.
  std::optional<PayloadId> payload;
  SimTime airtime{0};
  SlotClaim claim = SlotClaim::Acquisition;
};

enum class TimerName : std::uint8_t {
  JoinListen,
  SenseRetry,
  Backoff,
  ReplyWindow,
  ScheduledSend,
  RoundEnd,
  Handoff,
  Contention,
};
inline constexpr std::size_t kTimerCount = 8;
std::string_view to_string(TimerName name);

namespace input {
struct Received {
  ProtocolMessage msg;
};
struct TimerFired {
  TimerName name;
};
struct ChannelState {
  bool busy;
};
struct SlotTick {
  int slot;
  std::int64_t frame;
};
struct AppSendRequest {
  PayloadId payload;
};
}  // namespace input

using NodeInput = std::variant<input::Received, input::TimerFired, input::ChannelState, input::SlotTick,
                               input::AppSendRequest>;

enum class DropReason : std::uint8_t { QueueOverflow };

namespace action {
struct Transmit {
  ProtocolMessage msg;
  SimTime at;
};
struct SetTimer {
  TimerName name;
  SimTime at;
};
struct CancelTimer {
  TimerName name;
};
struct SenseChannel {};
struct DeliverUp {
  PayloadId payload;
};
struct Drop {
  PayloadId payload;
  DropReason reason;
};
/// An input the node had no rule for.
struct Ignored {
  std::string_view reason;
};
}  // namespace action

using NodeAction = std::variant<action::Transmit, action::SetTimer, action::CancelTimer, action::SenseChannel,
                                action::DeliverUp, action::Drop, action::Ignored>;

/// Short name of the action variant ("TRANSMIT", "SET_TIMER", ...).
std::string_view action_name(const NodeAction& a);

enum class NodePhase : std::uint8_t {
  Idle,
  Sensing,
  DifsWait,
  AwaitWts,
  ScheduledWait,
  Transmitting,
  ContentionWait,
  Joining,
};
std::string_view to_string(NodePhase phase);

enum class RoundRole : std::uint8_t { Listener, Responder, Member, Initiator };

/// What a vehicle knows about the round it is currently part of or overhearing.
struct RoundState {
  std::shared_ptr<const BroadcastTable> table;
  SimTime data_start{0};
  /// WTS flags are final (learned from a DATA frame or set by this initiator).
  bool final_table = false;
  RoundRole role = RoundRole::Listener;
  /// This vehicle's position in the transmission order, -1 if not sending.
  int my_slot = -1;
  int member_count = 0;
  bool sent = false;

  bool same_round(const BroadcastTable& t, SimTime start) const {
    return data_start == start && table->initiator() == t.initiator();
  }
};

/// Armed deadlines, one per timer name.
class TimerSet {
 public:
  void arm(TimerName n, SimTime at) { slots_[index(n)] = at; }
  void clear(TimerName n) { slots_[index(n)].reset(); }
  bool armed(TimerName n) const { return slots_[index(n)].has_value(); }
  std::optional<SimTime> deadline(TimerName n) const { return slots_[index(n)]; }
  /// True if `n` is armed for exactly `now`; a fired timer that does not match was re-armed or cancelled.
  bool due(TimerName n, SimTime now) const { return slots_[index(n)] == now; }

  friend bool operator==(const TimerSet&, const TimerSet&) = default;

 private:
  static constexpr std::size_t index(TimerName n) { return static_cast<std::size_t>(n); }
  std::array<std::optional<SimTime>, kTimerCount> slots_{};
};

struct NodeState {
  MacAddress mac;
  ProtocolKind kind = ProtocolKind::CfMac;
  /// Stable index used by the baseline's slot assignment.
  std::int64_t node_index = 0;
  ProtocolConfig cfg;
  NodePhase phase = NodePhase::Joining;
  NeighborTable nt;
  std::optional<RoundState> round;
  std::deque<PayloadId> pending;
  TimerSet timers;
  bool last_channel_busy = false;
  /// I-MAC: a SENSE_CHANNEL is outstanding.
  bool sense_outstanding = false;
  /// I-MAC: the outstanding sense is the last check after DIFS backoff.
  bool final_check = false;
  /// Baseline: the one-row table piggybacked on every frame.
  std::shared_ptr<const BroadcastTable> fixed_table;

  const BroadcastTable* current_bt() const { return round ? round->table.get() : nullptr; }
};

}  // namespace vanetmac
