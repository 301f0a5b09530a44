#pragma once

// Four-vehicle platoon: 01 initiates, 00 and 03 ask to send, 02 stays quiet.
//
// 00 opens a round alone at 55 ms; its table is [00, 01, 02, 03], so 01 is
// the first row without WTS and carries the table on. 03 gets a payload while
// listening to that round and 00 a second one while sending its DATA, so both
// answer 01's IBT.

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "vanetmac/engine.hpp"
#include "vanetmac/event_queue.hpp"
#include "vanetmac/mac_address.hpp"
#include "vanetmac/simulator.hpp"

namespace fixture {

using namespace vanetmac;

// The printed addresses of 02 and 03 contain the non-hex octets "R6" and "T8";
// "86" and "78" stand in for them. Only the leading octet decides the order.
inline const MacAddress kMac00 = parse_mac("00-1D-0F-C3-01-D3-1D-0F");
inline const MacAddress kMac01 = parse_mac("01-1D-3D-C3-78-F6-1D-3D");
inline const MacAddress kMac02 = parse_mac("02-1D-0F-86-42-F2-A1-33");
inline const MacAddress kMac03 = parse_mac("03-1D-0F-C3-77-F7-11-78");

inline NeighborTable table_of(std::initializer_list<MacAddress> macs) {
  NeighborTable nt;
  for (const auto& m : macs) nt.upsert(BeaconInfo{m, {}}, SimTime{0});
  return nt;
}

struct SentFrame {
  MacAddress sender;
  MessageKind kind;
  SimTime at;
  std::shared_ptr<const BroadcastTable> table;
};

struct ExampleOutcome {
  std::vector<SentFrame> frames;

  /// DATA frames of the first round initiated by 01, in transmission order.
  /// The table keeps being handed on afterwards, so 01 initiates again later.
  std::vector<MacAddress> round_data() const {
    std::vector<MacAddress> out;
    for (const auto& f : frames) {
      if (f.kind != MessageKind::Data || !f.table) continue;
      if (f.table->initiator() == kMac01) {
        out.push_back(f.sender);
      } else if (!out.empty()) {
        break;
      }
    }
    return out;
  }
  std::shared_ptr<const BroadcastTable> round_table() const {
    for (const auto& f : frames) {
      if (f.kind == MessageKind::Data && f.table && f.table->initiator() == kMac01) return f.table;
    }
    return nullptr;
  }
  /// Sender of the first IBT after 01's round.
  std::optional<MacAddress> next_initiator() const {
    bool in_round = false;
    for (const auto& f : frames) {
      if (f.kind == MessageKind::Data && f.table && f.table->initiator() == kMac01) in_round = true;
      if (in_round && f.kind == MessageKind::Ibt) return f.sender;
    }
    return std::nullopt;
  }
};

struct ScriptedRequest {
  SimTime at;
  std::uint32_t node;
};

inline const std::vector<ScriptedRequest> kScript{{SimTime{55'000}, 0}, {SimTime{56'000}, 3}, {SimTime{59'000}, 0}};
inline constexpr SimTime kHorizon{200'000};

// Drives the four state machines directly. Every frame reaches every other
// vehicle when it ends and the channel always senses idle.
inline ExampleOutcome engine_worked_example(ProtocolKind kind) {
  const std::vector<MacAddress> macs{kMac00, kMac01, kMac02, kMac03};
  ProtocolConfig cfg;
  std::vector<NodeState> nodes;
  std::vector<DeterministicRng> rngs;
  for (std::size_t i = 0; i < macs.size(); ++i) {
    nodes.push_back(create_node(kind, macs[i], cfg, static_cast<std::int64_t>(i)));
    rngs.emplace_back(100 + i);
  }

  struct Delivery {
    std::size_t node;
    NodeInput input;
  };
  EventQueue<Delivery> q;
  ExampleOutcome out;
  std::vector<NodeAction> actions;

  auto apply = [&](std::size_t i, SimTime now) {
    for (auto& a : actions) {
      if (auto* t = std::get_if<action::Transmit>(&a)) {
        out.frames.push_back({nodes[i].mac, t->msg.kind, t->at, t->msg.table});
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          if (j != i) q.push(t->at + t->msg.airtime, Delivery{j, input::Received{t->msg}});
        }
      } else if (auto* s = std::get_if<action::SetTimer>(&a)) {
        q.push(s->at, Delivery{i, input::TimerFired{s->name}});
      } else if (std::holds_alternative<action::SenseChannel>(a)) {
        q.push(now, Delivery{i, input::ChannelState{false}});
      }
    }
    actions.clear();
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j) continue;
      ProtocolMessage beacon;
      beacon.sender = macs[j];
      step(nodes[i], input::Received{beacon}, SimTime{0}, rngs[i], actions);
    }
    actions.clear();
    activate_node(nodes[i], SimTime{0}, actions);
    apply(i, SimTime{0});
  }
  PayloadId next_id = 1;
  for (const auto& r : kScript) q.push(r.at, Delivery{r.node, input::AppSendRequest{next_id++}});

  while (auto e = q.pop_next()) {
    if (e->time > kHorizon) break;
    auto& d = e->payload;
    step(nodes[d.node], d.input, e->time, rngs[d.node], actions);
    apply(d.node, e->time);
  }
  return out;
}

// Same script in the simulator: four static vehicles 10 m apart, no fading.
inline SimulationSetup worked_example_setup(ProtocolKind kind) {
  SimulationSetup s;
  s.kind = kind;
  s.scenario.n_vehicles = 4;
  s.scenario.speed = 0.0;
  s.scenario.sim_duration = to_seconds(kHorizon);
  s.scenario.warmup = 0.01;
  s.protocol = s.scenario.protocol_config();
  s.channel = s.scenario.channel();
  s.channel.fading = false;
  s.vehicles = {{kMac00, 100.0, 0}, {kMac01, 110.0, 0}, {kMac02, 120.0, 1}, {kMac03, 130.0, 1}};
  s.periodic_payloads = false;
  s.known_neighbors = true;
  for (const auto& r : kScript) s.scripted.push_back({r.at, r.node});
  return s;
}

class FrameLog : public TraceSink {
 public:
  explicit FrameLog(ExampleOutcome& out) : out_(out) {}
  void on_action(SimTime, std::uint32_t, const MacAddress& mac, const NodeAction& a) override {
    if (auto* t = std::get_if<action::Transmit>(&a)) out_.frames.push_back({mac, t->msg.kind, t->at, t->msg.table});
  }
  bool wants_actions() const override { return true; }

 private:
  ExampleOutcome& out_;
};

inline ExampleOutcome sim_worked_example(ProtocolKind kind) {
  ExampleOutcome out;
  FrameLog log(out);
  Simulator sim(worked_example_setup(kind));
  sim.add_sink(log);
  sim.run();
  return out;
}

}  // namespace fixture
