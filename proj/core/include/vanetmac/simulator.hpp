#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "vanetmac/channel.hpp"
#include "vanetmac/engine.hpp"
#include "vanetmac/event_queue.hpp"
#include "vanetmac/mobility.hpp"
#include "vanetmac/scenario.hpp"
#include "vanetmac/trace.hpp"

namespace vanetmac {

struct VehicleSpec {
  MacAddress mac;
  double x = 0.0;
  int lane = 0;
};

/// One-shot application payload injected at a fixed time.
struct ScriptedPayload {
  SimTime at{0};
  std::uint32_t node = 0;
};

/// Everything a run needs. `random()` builds the standard highway scenario;
/// tests assemble static layouts by hand.
struct SimulationSetup {
  ProtocolKind kind = ProtocolKind::CfMac;
  ScenarioConfig scenario;
  ProtocolConfig protocol;
  ChannelModel channel;
  std::vector<VehicleSpec> vehicles;
  /// Every vehicle offers one payload per beacon_interval, starting at a random phase.
  bool periodic_payloads = true;
  std::vector<ScriptedPayload> scripted;
  /// Vehicles start out knowing every vehicle in range, as if beacons had
  /// already been exchanged.
  bool known_neighbors = false;

  /// Uniform random placement of scenario.n_vehicles vehicles with random addresses.
  /// Placement and traffic depend only on the scenario (seed included), not on `kind`.
  static SimulationSetup random(ProtocolKind kind, const ScenarioConfig& scenario);
};

/// Kernel-side counters, kept independently of any sink. The `*_after_warmup`
/// fields cover frames that started at or after the warmup boundary.
struct RunStats {
  std::uint64_t events = 0;
  std::uint64_t frames = 0;
  std::uint64_t payloads_offered = 0;
  std::uint64_t delivered_up = 0;
  std::uint64_t ignored_inputs = 0;
  std::uint64_t half_duplex = 0;
  std::uint64_t frames_after_warmup = 0;
  std::uint64_t pairs_after_warmup = 0;
  std::uint64_t success_after_warmup = 0;
  std::uint64_t collided_after_warmup = 0;
  std::uint64_t faded_after_warmup = 0;
  std::uint64_t drops_after_warmup = 0;
};

namespace event {
struct Input {
  std::uint32_t node;
  NodeInput input;
};
struct TxStart {
  std::uint32_t node;
  ProtocolMessage msg;
};
struct TxEnd {
  std::uint64_t frame;
};
/// Slot boundary: vehicles move one slot, baseline vehicles get their SLOT_TICK.
struct MobilityTick {
  std::int64_t slot_number;
};
struct Payload {
  std::uint32_t node;
};
struct End {};
}  // namespace event

using SimEventPayload =
    std::variant<event::Input, event::TxStart, event::TxEnd, event::MobilityTick, event::Payload, event::End>;
using SimEvent = TimedEvent<SimEventPayload>;

/// Single-threaded discrete-event run of one protocol on one scenario.
/// Identical setups produce identical event sequences.
class Simulator {
 public:
  /// Throws ConfigError on an invalid scenario, protocol or channel configuration.
  explicit Simulator(SimulationSetup setup);

  /// Sinks must outlive run().
  void add_sink(TraceSink& sink) { sinks_.push_back(&sink); }

  /// Runs until scenario.sim_duration.
  RunStats run();

  const std::vector<VehicleBody>& bodies() const { return bodies_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }
  const SimulationSetup& setup() const { return setup_; }

 private:
  struct ActiveTx {
    TxRecord rec;
    ProtocolMessage msg;
  };

  void dispatch(std::uint32_t node, const NodeInput& in);
  void apply_actions(std::uint32_t node);
  void start_tx(std::uint32_t node, ProtocolMessage msg);
  void end_tx(std::uint64_t frame);
  void mobility_tick(std::int64_t slot_number);
  bool channel_busy(std::uint32_t node) const;
  double success_prob(double d) const;

  SimulationSetup setup_;
  HighwayGeometry geo_;
  SimTime warmup_{0};
  SimTime end_{0};
  SimTime beacon_interval_{0};
  SimTime max_airtime_{0};

  std::vector<VehicleBody> bodies_;
  std::vector<NodeState> nodes_;
  std::vector<DeterministicRng> node_rngs_;
  DeterministicRng fading_rng_;
  std::vector<std::vector<std::uint32_t>> baseline_by_slot_;
  std::vector<std::optional<std::uint64_t>> last_frame_;
  std::vector<double> prob_table_;
  double prob_step_ = 0.01;

  EventQueue<SimEventPayload> queue_;
  SimTime now_{0};
  std::vector<ActiveTx> active_;
  std::uint64_t next_frame_ = 0;
  std::uint64_t next_payload_ = 0;
  bool want_actions_ = false;

  std::vector<NodeAction> scratch_;
  std::vector<std::size_t> overlapping_;
  FrameOutcome frame_scratch_;
  std::vector<TraceSink*> sinks_;
  RunStats stats_;
};

}  // namespace vanetmac
