#include "vanetmac/engine.hpp"

#include <string>

#include "vanetmac/error.hpp"

namespace vanetmac {

// ---------------------------------------------------------------------------
// Names and configuration
// ---------------------------------------------------------------------------

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::CfMac: return "CF_MAC";
    case ProtocolKind::IMac: return "I_MAC";
    case ProtocolKind::BaselineTdma: return "BASELINE_TDMA";
  }
  return "?";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
  if (name == "CF_MAC") return ProtocolKind::CfMac;
  if (name == "I_MAC") return ProtocolKind::IMac;
  if (name == "BASELINE_TDMA") return ProtocolKind::BaselineTdma;
  throw ParseError("unknown protocol '" + std::string(name) + "' (expected CF_MAC, I_MAC or BASELINE_TDMA)", 0);
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Beacon: return "BEACON";
    case MessageKind::Ibt: return "IBT";
    case MessageKind::Wts: return "WTS";
    case MessageKind::Data: return "DATA";
  }
  return "?";
}

std::string_view to_string(TimerName name) {
  switch (name) {
    case TimerName::JoinListen: return "join_listen";
    case TimerName::SenseRetry: return "sense_retry";
    case TimerName::Backoff: return "backoff";
    case TimerName::ReplyWindow: return "reply_window";
    case TimerName::ScheduledSend: return "scheduled_send";
    case TimerName::RoundEnd: return "round_end";
    case TimerName::Handoff: return "handoff";
    case TimerName::Contention: return "contention";
  }
  return "?";
}

std::string_view to_string(NodePhase phase) {
  switch (phase) {
    case NodePhase::Idle: return "IDLE";
    case NodePhase::Sensing: return "SENSING";
    case NodePhase::DifsWait: return "DIFS_WAIT";
    case NodePhase::AwaitWts: return "AWAIT_WTS";
    case NodePhase::ScheduledWait: return "SCHEDULED_WAIT";
    case NodePhase::Transmitting: return "TRANSMITTING";
    case NodePhase::ContentionWait: return "CONTENTION_WAIT";
    case NodePhase::Joining: return "JOINING";
  }
  return "?";
}

std::string_view action_name(const NodeAction& a) {
  struct Visitor {
    std::string_view operator()(const action::Transmit&) const { return "TRANSMIT"; }
    std::string_view operator()(const action::SetTimer&) const { return "SET_TIMER"; }
    std::string_view operator()(const action::CancelTimer&) const { return "CANCEL_TIMER"; }
    std::string_view operator()(const action::SenseChannel&) const { return "SENSE_CHANNEL"; }
    std::string_view operator()(const action::DeliverUp&) const { return "DELIVER_UP"; }
    std::string_view operator()(const action::Drop&) const { return "DROP"; }
    std::string_view operator()(const action::Ignored&) const { return "IGNORED"; }
  };
  return std::visit(Visitor{}, a);
}

void ProtocolConfig::validate() const {
  if (slot_duration <= SimTime::zero()) throw ConfigError("slot_duration", "must be positive");
  if (slots_per_frame < 1) throw ConfigError("slots_per_frame", "must be at least 1");
  if (sifs <= SimTime::zero()) throw ConfigError("sifs", "must be positive");
  if (difs <= sifs) throw ConfigError("difs", "must be longer than SIFS");
  if (backoff_slot <= SimTime::zero()) throw ConfigError("backoff_slot", "must be positive");
  if (contention_window < 1) throw ConfigError("contention_window", "must be at least 1");
  if (queue_capacity < 1) throw ConfigError("queue_capacity", "must be at least 1");
  if (ibt_airtime <= SimTime::zero() || ibt_airtime > slot_duration) {
    throw ConfigError("ibt_airtime", "must be positive and at most one slot");
  }
  if (wts_airtime <= SimTime::zero() || wts_airtime > sifs) {
    throw ConfigError("wts_airtime", "must be positive and no longer than SIFS");
  }
  if (data_airtime <= SimTime::zero() || data_airtime > slot_duration) {
    throw ConfigError("data_airtime", "must be positive and at most one slot");
  }
  if (join_listen < SimTime::zero()) throw ConfigError("join_listen", "must not be negative");
  if (neighbor_window <= SimTime::zero()) throw ConfigError("neighbor_window", "must be positive");
}

// ---------------------------------------------------------------------------
// Helper operations
// ---------------------------------------------------------------------------

SimTime wts_reply_delay(std::int64_t row_index, SimTime sifs) {
  if (row_index < 1) throw ProtocolError("the initiator (row 0) never replies with WTS");
  return sifs * row_index;
}

SimTime contention_backoff(DeterministicRng& rng, int cw, SimTime backoff_slot, SimTime difs) {
  if (cw < 1) throw ProtocolError("contention window must be at least 1");
  const auto u = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(cw)));
  return difs + backoff_slot * u;
}

int baseline_slot_assign(std::int64_t node_index, int slots_per_frame) {
  if (slots_per_frame < 1) throw ProtocolError("slots_per_frame must be at least 1");
  auto r = node_index % slots_per_frame;
  if (r < 0) r += slots_per_frame;
  return static_cast<int>(r);
}

NodeState create_node(ProtocolKind kind, const MacAddress& mac, const ProtocolConfig& cfg,
                      std::int64_t node_index) {
  cfg.validate();
  NodeState node;
  node.mac = mac;
  node.kind = kind;
  node.node_index = node_index;
  node.cfg = cfg;
  node.phase = NodePhase::Joining;
  if (kind == ProtocolKind::BaselineTdma) {
    node.fixed_table = std::make_shared<const BroadcastTable>(std::vector<BroadcastRow>{{mac, true}});
  }
  return node;
}

void activate_node(NodeState& node, SimTime now, std::vector<NodeAction>& out) {
  node.timers.arm(TimerName::JoinListen, now + node.cfg.join_listen);
  out.push_back(action::SetTimer{TimerName::JoinListen, now + node.cfg.join_listen});
}

// ---------------------------------------------------------------------------
// State machine
// ---------------------------------------------------------------------------

namespace {

/// Position of `mac` among the rows with wts = 1, or -1.
int order_index(const BroadcastTable& bt, const MacAddress& mac) {
  int k = 0;
  for (const auto& r : bt.rows()) {
    if (r.mac == mac) return r.wts ? k : -1;
    if (r.wts) ++k;
  }
  return -1;
}

class Machine {
 public:
  Machine(NodeState& node, SimTime now, DeterministicRng& rng, std::vector<NodeAction>& out)
      : n_(node), now_(now), rng_(rng), out_(out), cfg_(node.cfg) {}

  void on(const input::AppSendRequest& in) {
    if (!enqueue(in.payload)) return;
    if (n_.kind == ProtocolKind::BaselineTdma) return;
    if (n_.phase == NodePhase::Idle && !n_.round && !n_.timers.armed(TimerName::Handoff)) {
      begin_initiation();
    }
  }

  void on(const input::TimerFired& in) {
    if (!n_.timers.due(in.name, now_)) return;  // cancelled or re-armed
    n_.timers.clear(in.name);
    if (n_.kind == ProtocolKind::BaselineTdma) {
      if (in.name == TimerName::JoinListen && n_.phase == NodePhase::Joining) n_.phase = NodePhase::Idle;
      return;
    }
    switch (in.name) {
      case TimerName::JoinListen:
        if (n_.phase == NodePhase::Joining) {
          n_.phase = NodePhase::Idle;
          if (!n_.round && !n_.pending.empty()) begin_initiation();
        }
        break;
      case TimerName::SenseRetry:
        if (n_.phase == NodePhase::Sensing) sense();
        break;
      case TimerName::Backoff:
        if (n_.phase == NodePhase::DifsWait) {
          n_.final_check = true;
          sense();
        }
        break;
      case TimerName::ReplyWindow:
        if (n_.phase == NodePhase::AwaitWts) close_reply_window();
        break;
      case TimerName::ScheduledSend:
        if (n_.phase == NodePhase::ScheduledWait && n_.round && !n_.round->sent) send_data();
        break;
      case TimerName::RoundEnd:
        if (n_.round) end_round();
        break;
      case TimerName::Handoff:
        if (n_.phase == NodePhase::Idle && !n_.round && !n_.pending.empty()) enter_contention();
        break;
      case TimerName::Contention:
        if (n_.phase == NodePhase::ContentionWait) {
          n_.phase = NodePhase::Idle;
          if (!n_.round) send_ibt();
        }
        break;
    }
  }

  void on(const input::ChannelState& in) {
    n_.last_channel_busy = in.busy;
    if (!n_.sense_outstanding) {
      out_.push_back(action::Ignored{"channel state without an outstanding sense"});
      return;
    }
    n_.sense_outstanding = false;
    if (n_.phase == NodePhase::Sensing) {
      if (in.busy) {
        arm(TimerName::SenseRetry, now_ + cfg_.slot_duration);
      } else {
        n_.phase = NodePhase::DifsWait;
        arm(TimerName::Backoff,
            now_ + contention_backoff(rng_, cfg_.contention_window, cfg_.backoff_slot, cfg_.difs));
      }
    } else if (n_.phase == NodePhase::DifsWait && n_.final_check) {
      n_.final_check = false;
      if (in.busy) {
        n_.phase = NodePhase::Sensing;
        arm(TimerName::SenseRetry, now_ + cfg_.slot_duration);
      } else {
        send_ibt();
      }
    } else {
      out_.push_back(action::Ignored{"channel state in a phase that does not sense"});
    }
  }

  void on(const input::SlotTick& in) {
    if (n_.kind != ProtocolKind::BaselineTdma) {
      out_.push_back(action::Ignored{"slot tick outside baseline TDMA"});
      return;
    }
    if (in.slot != baseline_slot_assign(n_.node_index, cfg_.slots_per_frame)) return;
    ProtocolMessage msg;
    msg.kind = MessageKind::Data;
    msg.sender = n_.mac;
    msg.table = n_.fixed_table;
    msg.round_start = now_;
    msg.airtime = cfg_.data_airtime;
    msg.claim = SlotClaim::FixedAssignment;
    if (!n_.pending.empty()) {
      msg.payload = n_.pending.front();
      n_.pending.pop_front();
    }
    out_.push_back(action::Transmit{std::move(msg), now_});
  }

  void on(const input::Received& in) {
    const auto& msg = in.msg;
    if (msg.sender == n_.mac) return;
    n_.nt.upsert(BeaconInfo{msg.sender, msg.position}, now_);
    if (msg.kind == MessageKind::Data && msg.payload) out_.push_back(action::DeliverUp{*msg.payload});
    if (n_.kind == ProtocolKind::BaselineTdma) return;
    switch (msg.kind) {
      case MessageKind::Beacon: break;
      case MessageKind::Wts: on_wts(msg); break;
      case MessageKind::Ibt: on_ibt(msg); break;
      case MessageKind::Data: on_data(msg); break;
    }
  }

 private:
  void arm(TimerName name, SimTime at) {
    n_.timers.arm(name, at);
    out_.push_back(action::SetTimer{name, at});
  }

  void cancel(TimerName name) {
    if (!n_.timers.armed(name)) return;
    n_.timers.clear(name);
    out_.push_back(action::CancelTimer{name});
  }

  bool enqueue(PayloadId p) {
    if (n_.pending.size() >= cfg_.queue_capacity) {
      out_.push_back(action::Drop{p, DropReason::QueueOverflow});
      return false;
    }
    n_.pending.push_back(p);
    return true;
  }

  void sense() {
    n_.sense_outstanding = true;
    out_.push_back(action::SenseChannel{});
  }

  /// Drops any pending own initiation or contention in favour of a round heard on air.
  void abandon_initiation() {
    cancel(TimerName::SenseRetry);
    cancel(TimerName::Backoff);
    cancel(TimerName::Contention);
    cancel(TimerName::Handoff);
    cancel(TimerName::JoinListen);
    n_.sense_outstanding = false;
    n_.final_check = false;
    n_.phase = NodePhase::Idle;
  }

  // Rule 1 / rule 2: start acquiring the channel with an IBT.
  void begin_initiation() {
    if (n_.kind == ProtocolKind::CfMac) {
      send_ibt();
    } else {
      n_.phase = NodePhase::Sensing;
      n_.final_check = false;
      sense();
    }
  }

  void send_ibt() {
    n_.nt.expire(now_, cfg_.neighbor_window);
    auto table = std::make_shared<const BroadcastTable>(build_ibt(n_.mac, n_.nt));
    RoundState r;
    r.table = table;
    r.data_start = now_ + cfg_.ibt_airtime + cfg_.slot_duration;
    r.role = RoundRole::Initiator;
    n_.round = std::move(r);
    n_.phase = NodePhase::AwaitWts;

    ProtocolMessage msg;
    msg.kind = MessageKind::Ibt;
    msg.sender = n_.mac;
    msg.table = std::move(table);
    msg.round_start = n_.round->data_start;
    msg.airtime = cfg_.ibt_airtime;
    msg.claim = SlotClaim::Acquisition;
    out_.push_back(action::Transmit{std::move(msg), now_});
    arm(TimerName::ReplyWindow, n_.round->data_start);
  }

  /// Long enough to hear the successor's first DATA: its backoff, IBT, reply window and slot.
  SimTime handoff_wait() const {
    return cfg_.difs + cfg_.backoff_slot * cfg_.contention_window + cfg_.ibt_airtime + cfg_.slot_duration * 2;
  }

  void enter_contention() {
    if (n_.kind == ProtocolKind::IMac) {
      // Carrier sensing with DIFS backoff is I-MAC's contention procedure.
      begin_initiation();
      return;
    }
    n_.phase = NodePhase::ContentionWait;
    arm(TimerName::Contention,
        now_ + contention_backoff(rng_, cfg_.contention_window, cfg_.backoff_slot, cfg_.difs));
  }

  void on_wts(const ProtocolMessage& msg) {
    if (n_.phase != NodePhase::AwaitWts || msg.target != n_.mac || !n_.round) return;
    auto bt = admit_row(*n_.round->table, msg.sender);
    n_.round->table = std::make_shared<const BroadcastTable>(mark_wts(std::move(bt), msg.sender));
  }

  void on_ibt(const ProtocolMessage& msg) {
    if (!msg.table) return;
    // A bystander of some other round has no slot to keep and may answer a neighbour's IBT.
    if (n_.round && (n_.round->role != RoundRole::Listener || n_.pending.empty())) return;
    const bool joining = n_.phase == NodePhase::Joining;
    abandon_initiation();

    RoundState r;
    r.table = msg.table;
    r.data_start = msg.round_start;
    r.role = RoundRole::Listener;
    const auto rows = static_cast<std::int64_t>(msg.table->size());
    n_.round = std::move(r);
    arm(TimerName::RoundEnd, msg.round_start + cfg_.slot_duration * (rows + 1));

    // A joining vehicle only listens during the first round it hears.
    if (joining || n_.pending.empty()) return;

    SimTime delay;
    if (auto row = msg.table->row_index(n_.mac)) {
      delay = wts_reply_delay(static_cast<std::int64_t>(*row), cfg_.sifs);
    } else {
      // Not yet known to the initiator: answer after every listed row.
      const auto extra = static_cast<std::int64_t>(rng_.uniform_below(static_cast<std::uint64_t>(cfg_.contention_window)));
      delay = cfg_.sifs * (rows + extra);
    }
    ProtocolMessage wts;
    wts.kind = MessageKind::Wts;
    wts.sender = n_.mac;
    wts.target = msg.table->initiator();
    wts.airtime = cfg_.wts_airtime;
    wts.claim = SlotClaim::Acquisition;
    out_.push_back(action::Transmit{std::move(wts), now_ + delay});
    n_.round->role = RoundRole::Responder;
  }

  void on_data(const ProtocolMessage& msg) {
    if (!msg.table) return;
    const auto& table = *msg.table;
    if (n_.round && !n_.round->same_round(table, msg.round_start)) return;  // busy in another round
    const int sender_slot = order_index(table, msg.sender);
    if (sender_slot < 0) {
      out_.push_back(action::Ignored{"DATA from a vehicle without a reservation in its own table"});
      return;
    }

    if (!n_.round) {
      abandon_initiation();
      RoundState r;
      r.table = msg.table;
      r.data_start = msg.round_start;
      r.final_table = true;
      r.role = RoundRole::Listener;
      n_.round = std::move(r);
    } else if (!n_.round->final_table) {
      n_.round->table = msg.table;
      n_.round->final_table = true;
      if (n_.round->role == RoundRole::Responder) {
        const int mine = order_index(table, n_.mac);
        if (mine >= 0) {
          n_.round->role = RoundRole::Member;
          n_.round->my_slot = mine;
          n_.phase = NodePhase::ScheduledWait;
        } else {
          n_.round->role = RoundRole::Listener;
        }
      }
    }

    auto& r = *n_.round;
    r.member_count = static_cast<int>(table.wts_count());
    const SimTime latest_end = r.data_start + cfg_.slot_duration * (r.member_count + 1);
    if (n_.timers.deadline(TimerName::RoundEnd) != latest_end && !(r.sent && r.my_slot == r.member_count - 1)) {
      arm(TimerName::RoundEnd, latest_end);
    }

    if (r.role == RoundRole::Member && !r.sent) {
      if (r.my_slot == sender_slot + 1) {
        send_data();
      } else if (r.my_slot <= sender_slot) {
        // Our turn went by unheard; wait for the next round.
        r.role = RoundRole::Listener;
        n_.phase = NodePhase::Idle;
        cancel(TimerName::ScheduledSend);
      } else {
        const SimTime fallback = r.data_start + cfg_.slot_duration * (r.my_slot + 1);
        if (n_.timers.deadline(TimerName::ScheduledSend) != fallback) arm(TimerName::ScheduledSend, fallback);
      }
    }

    if (sender_slot == r.member_count - 1) end_round();
  }

  // Rule 4: the initiator closes its reply window and opens the round.
  void close_reply_window() {
    auto& r = *n_.round;
    r.table = std::make_shared<const BroadcastTable>(mark_wts(*r.table, n_.mac));
    r.final_table = true;
    r.role = RoundRole::Member;
    r.my_slot = 0;
    r.member_count = static_cast<int>(r.table->wts_count());
    n_.phase = NodePhase::ScheduledWait;
    arm(TimerName::RoundEnd, r.data_start + cfg_.slot_duration * (r.member_count + 1));
    send_data();
  }

  // Rule 5: DATA with the current table piggybacked.
  void send_data() {
    auto& r = *n_.round;
    ProtocolMessage msg;
    msg.kind = MessageKind::Data;
    msg.sender = n_.mac;
    msg.table = r.table;
    msg.round_start = r.data_start;
    msg.airtime = cfg_.data_airtime;
    msg.claim = SlotClaim::Reserved;
    if (!n_.pending.empty()) {
      msg.payload = n_.pending.front();
      n_.pending.pop_front();
    }
    out_.push_back(action::Transmit{std::move(msg), now_});
    r.sent = true;
    n_.phase = NodePhase::Transmitting;
    cancel(TimerName::ScheduledSend);
    if (r.my_slot == r.member_count - 1) arm(TimerName::RoundEnd, now_ + cfg_.data_airtime);
  }

  // Rule 6: hand the channel to the first row that did not ask to send.
  void end_round() {
    const auto table = n_.round->table;
    const bool final_table = n_.round->final_table;
    n_.round.reset();
    cancel(TimerName::RoundEnd);
    cancel(TimerName::ScheduledSend);
    n_.phase = NodePhase::Idle;

    const auto next = final_table ? next_initiator(*table) : std::nullopt;
    // The first row without WTS carries the table on, with or without a payload of its own.
    if (final_table && next == n_.mac) {
      begin_initiation();
      return;
    }
    if (n_.pending.empty()) return;
    if (final_table && !next) {
      enter_contention();
    } else {
      arm(TimerName::Handoff, now_ + handoff_wait());
    }
  }

  NodeState& n_;
  SimTime now_;
  DeterministicRng& rng_;
  std::vector<NodeAction>& out_;
  const ProtocolConfig& cfg_;
};

}  // namespace

void step(NodeState& node, const NodeInput& in, SimTime now, DeterministicRng& rng, std::vector<NodeAction>& out) {
  Machine m(node, now, rng, out);
  std::visit([&](const auto& i) { m.on(i); }, in);
}

Transition handle_event(NodeState node, const NodeInput& in, SimTime now, DeterministicRng& rng) {
  Transition t{std::move(node), {}};
  step(t.node, in, now, rng, t.actions);
  return t;
}

}  // namespace vanetmac
