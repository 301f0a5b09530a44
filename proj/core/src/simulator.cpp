#include "vanetmac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "vanetmac/error.hpp"

namespace vanetmac {

namespace {

constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kPayloadStream = 2;
constexpr std::uint64_t kFadingStream = 3;
constexpr std::uint64_t kNodeStreamBase = 1000;

}  // namespace

SimulationSetup SimulationSetup::random(ProtocolKind kind, const ScenarioConfig& scenario) {
  scenario.validate();
  SimulationSetup s;
  s.kind = kind;
  s.scenario = scenario;
  s.protocol = scenario.protocol_config();
  s.channel = scenario.channel();

  DeterministicRng rng(DeterministicRng::derive_seed(scenario.seed, kPlacementStream));
  std::unordered_set<std::uint64_t> used;
  s.vehicles.reserve(static_cast<std::size_t>(scenario.n_vehicles));
  for (int i = 0; i < scenario.n_vehicles; ++i) {
    std::uint64_t id = rng.next();
    while (!used.insert(id).second) id = rng.next();
    VehicleSpec v;
    v.mac = MacAddress::from_u64(id);
    v.x = rng.uniform01() * scenario.highway_length;
    v.lane = static_cast<int>(rng.uniform_below(2));
    s.vehicles.push_back(v);
  }
  return s;
}

Simulator::Simulator(SimulationSetup setup)
    : setup_(std::move(setup)),
      fading_rng_(DeterministicRng::derive_seed(setup_.scenario.seed, kFadingStream)) {
  setup_.scenario.validate();
  setup_.protocol.validate();
  setup_.channel.validate();
  if (setup_.vehicles.empty()) throw ConfigError("vehicles", "at least one vehicle is required");
  std::unordered_set<MacAddress> macs;
  for (const auto& v : setup_.vehicles) {
    if (!macs.insert(v.mac).second) throw ConfigError("vehicles", "address " + format_mac(v.mac) + " used twice");
  }

  geo_ = setup_.scenario.geometry();
  warmup_ = from_seconds(setup_.scenario.warmup);
  end_ = from_seconds(setup_.scenario.sim_duration);
  beacon_interval_ = from_seconds(setup_.scenario.beacon_interval);
  const auto& pc = setup_.protocol;
  max_airtime_ = std::max({pc.ibt_airtime, pc.wts_airtime, pc.data_airtime});

  const auto n = setup_.vehicles.size();
  bodies_.reserve(n);
  nodes_.reserve(n);
  node_rngs_.reserve(n);
  baseline_by_slot_.assign(static_cast<std::size_t>(pc.slots_per_frame), {});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = setup_.vehicles[i];
    if (!(v.x >= 0.0 && v.x < geo_.length)) throw ConfigError("vehicles", "position outside [0, highway_length)");
    if (v.lane != 0 && v.lane != 1) throw ConfigError("vehicles", "lane must be 0 or 1");
    bodies_.push_back(VehicleBody{v.mac, v.x, v.lane, lane_direction(v.lane)});
    nodes_.push_back(create_node(setup_.kind, v.mac, pc, static_cast<std::int64_t>(i)));
    node_rngs_.emplace_back(DeterministicRng::derive_seed(setup_.scenario.seed, kNodeStreamBase + i));
    if (setup_.kind == ProtocolKind::BaselineTdma) {
      const auto slot = baseline_slot_assign(static_cast<std::int64_t>(i), pc.slots_per_frame);
      baseline_by_slot_[static_cast<std::size_t>(slot)].push_back(static_cast<std::uint32_t>(i));
    }
  }
  last_frame_.assign(n, std::nullopt);

  const auto points = static_cast<std::size_t>(std::ceil(setup_.channel.range / prob_step_)) + 2;
  prob_table_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    prob_table_[i] = nakagami_success_prob(static_cast<double>(i) * prob_step_, setup_.channel);
  }
}

double Simulator::success_prob(double d) const {
  const double pos = d / prob_step_;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= prob_table_.size()) return prob_table_.back();
  const double frac = pos - static_cast<double>(i);
  return prob_table_[i] + (prob_table_[i + 1] - prob_table_[i]) * frac;
}

RunStats Simulator::run() {
  want_actions_ = std::any_of(sinks_.begin(), sinks_.end(), [](const TraceSink* s) { return s->wants_actions(); });

  if (setup_.known_neighbors) {
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      for (std::uint32_t j = 0; j < nodes_.size(); ++j) {
        if (i == j || !in_range(bodies_[i], bodies_[j], geo_, setup_.channel.range)) continue;
        nodes_[i].nt.upsert(BeaconInfo{bodies_[j].mac, PositionRecord{bodies_[j].x, bodies_[j].lane}}, now_);
      }
    }
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    scratch_.clear();
    activate_node(nodes_[i], now_, scratch_);
    apply_actions(i);
  }
  queue_.push(SimTime{0}, event::MobilityTick{0});

  if (setup_.periodic_payloads) {
    DeterministicRng phases(DeterministicRng::derive_seed(setup_.scenario.seed, kPayloadStream));
    const auto interval = static_cast<std::uint64_t>(beacon_interval_.count());
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      queue_.push(SimTime{static_cast<std::int64_t>(phases.uniform_below(interval))}, event::Payload{i});
    }
  }
  for (const auto& sp : setup_.scripted) {
    if (sp.node >= nodes_.size()) throw ConfigError("scripted", "payload for an unknown vehicle");
    queue_.push(sp.at, event::Input{sp.node, input::AppSendRequest{0}});
  }
  queue_.push(end_, event::End{});

  while (auto ev = queue_.pop_next()) {
    now_ = ev->time;
    ++stats_.events;
    if (std::holds_alternative<event::End>(ev->payload)) break;
    std::visit(
        [&](auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, event::Input>) {
            if (auto* send = std::get_if<input::AppSendRequest>(&e.input)) {
              send->payload = next_payload_++;
              ++stats_.payloads_offered;
            }
            dispatch(e.node, e.input);
          } else if constexpr (std::is_same_v<E, event::TxStart>) {
            start_tx(e.node, std::move(e.msg));
          } else if constexpr (std::is_same_v<E, event::TxEnd>) {
            end_tx(e.frame);
          } else if constexpr (std::is_same_v<E, event::MobilityTick>) {
            mobility_tick(e.slot_number);
          } else if constexpr (std::is_same_v<E, event::Payload>) {
            ++stats_.payloads_offered;
            queue_.push(now_ + beacon_interval_, event::Payload{e.node});
            dispatch(e.node, input::AppSendRequest{next_payload_++});
          }
        },
        ev->payload);
  }
  return stats_;
}

void Simulator::dispatch(std::uint32_t node, const NodeInput& in) {
  scratch_.clear();
  step(nodes_[node], in, now_, node_rngs_[node], scratch_);
  apply_actions(node);
}

void Simulator::apply_actions(std::uint32_t node) {
  // start_tx never re-enters dispatch, so scratch_ is stable while we walk it.
  for (auto& a : scratch_) {
    if (want_actions_) {
      for (auto* s : sinks_) s->on_action(now_, node, nodes_[node].mac, a);
    }
    if (auto* t = std::get_if<action::Transmit>(&a)) {
      if (t->at < now_) throw ProtocolError("transmission scheduled in the past");
      if (t->at == now_) {
        start_tx(node, t->msg);
      } else {
        queue_.push(t->at, event::TxStart{node, t->msg});
      }
    } else if (auto* st = std::get_if<action::SetTimer>(&a)) {
      if (st->at < now_) throw ProtocolError("timer armed in the past");
      queue_.push(st->at, event::Input{node, input::TimerFired{st->name}});
    } else if (std::holds_alternative<action::SenseChannel>(a)) {
      queue_.push(now_, event::Input{node, input::ChannelState{channel_busy(node)}});
    } else if (std::holds_alternative<action::DeliverUp>(a)) {
      ++stats_.delivered_up;
    } else if (auto* d = std::get_if<action::Drop>(&a)) {
      if (now_ >= warmup_) ++stats_.drops_after_warmup;
      const DropRecord rec{now_, node, d->payload};
      for (auto* s : sinks_) s->on_drop(rec);
    } else if (std::holds_alternative<action::Ignored>(a)) {
      ++stats_.ignored_inputs;
    }
  }
}

bool Simulator::channel_busy(std::uint32_t node) const {
  for (const auto& a : active_) {
    const auto& r = a.rec;
    if (r.sender == node || !(r.start < now_ && now_ < r.end)) continue;
    if (in_range(bodies_[r.sender], bodies_[node], geo_, setup_.channel.range)) return true;
  }
  return false;
}

void Simulator::start_tx(std::uint32_t node, ProtocolMessage msg) {
  const auto& body = bodies_[node];
  msg.position = PositionRecord{body.x, body.lane};

  ActiveTx tx;
  auto& rec = tx.rec;
  rec.frame = next_frame_++;
  rec.sender = node;
  rec.sender_mac = body.mac;
  rec.kind = msg.kind;
  rec.claim = msg.claim;
  rec.payload = msg.payload;
  rec.start = now_;
  rec.end = now_ + msg.airtime;
  rec.prev_frame = last_frame_[node];
  if (msg.table && (msg.kind == MessageKind::Ibt || msg.kind == MessageKind::Data)) {
    rec.round_initiator = msg.table->initiator();
    rec.round_start = msg.round_start;
  }
  last_frame_[node] = rec.frame;
  ++stats_.frames;

  for (auto* s : sinks_) s->on_transmit(rec);
  queue_.push(rec.end, event::TxEnd{rec.frame});
  tx.msg = std::move(msg);
  active_.push_back(std::move(tx));
}

void Simulator::end_tx(std::uint64_t frame) {
  // Anything that ended before the earliest possible start of a frame still on air is irrelevant.
  const SimTime horizon = now_ - max_airtime_;
  std::erase_if(active_, [&](const ActiveTx& a) { return a.rec.end <= horizon; });

  const auto it = std::find_if(active_.begin(), active_.end(), [&](const ActiveTx& a) { return a.rec.frame == frame; });
  if (it == active_.end()) throw ProtocolError("frame ended without being on air");
  const TxRecord tx = it->rec;
  const ProtocolMessage msg = it->msg;

  overlapping_.clear();
  for (std::size_t i = 0; i < active_.size(); ++i) {
    const auto& o = active_[i].rec;
    if (o.frame != frame && o.start < tx.end && tx.start < o.end) overlapping_.push_back(i);
  }

  auto& f = frame_scratch_;
  f.tx = tx;
  f.receptions.clear();
  f.participants.clear();

  const double range = setup_.channel.range;
  const auto& sender = bodies_[tx.sender];
  const bool counted = tx.start >= warmup_;
  for (std::uint32_t r = 0; r < bodies_.size(); ++r) {
    if (r == tx.sender) continue;
    const double d = distance(sender, bodies_[r], geo_);
    if (!in_range(d, range)) continue;

    bool transmitting = false;
    std::size_t interferers = 0;
    for (auto idx : overlapping_) {
      const auto& o = active_[idx].rec;
      if (o.sender == r) {
        transmitting = true;
        break;
      }
      if (o.sender != tx.sender && in_range(bodies_[o.sender], bodies_[r], geo_, range)) ++interferers;
    }
    if (transmitting) {
      ++stats_.half_duplex;
      continue;
    }

    ReceptionRecord rec;
    rec.receiver = r;
    rec.receiver_mac = bodies_[r].mac;
    if (interferers > 0) {
      rec.outcome = Outcome::Collided;
      rec.first_participant = static_cast<std::uint32_t>(f.participants.size());
      f.participants.push_back(tx.ref());
      for (auto idx : overlapping_) {
        const auto& o = active_[idx].rec;
        if (o.sender != tx.sender && in_range(bodies_[o.sender], bodies_[r], geo_, range)) {
          f.participants.push_back(o.ref());
        }
      }
      rec.participant_count = static_cast<std::uint32_t>(f.participants.size()) - rec.first_participant;
    } else {
      const double p = setup_.channel.fading ? success_prob(d) : 1.0;
      rec.outcome = (p >= 1.0 || fading_rng_.uniform01() < p) ? Outcome::Success : Outcome::Faded;
    }
    f.receptions.push_back(rec);
  }

  if (counted) {
    ++stats_.frames_after_warmup;
    for (const auto& r : f.receptions) {
      ++stats_.pairs_after_warmup;
      switch (r.outcome) {
        case Outcome::Success: ++stats_.success_after_warmup; break;
        case Outcome::Collided: ++stats_.collided_after_warmup; break;
        case Outcome::Faded: ++stats_.faded_after_warmup; break;
        case Outcome::NotReceived: break;
      }
    }
  }
  for (auto* s : sinks_) s->on_frame(f);

  // Receivers may transmit in reaction, which touches active_ and frame_scratch_;
  // collect the successful receivers first.
  std::vector<std::uint32_t> ok;
  for (const auto& r : f.receptions) {
    if (r.outcome == Outcome::Success) ok.push_back(r.receiver);
  }
  const NodeInput in = input::Received{msg};
  for (auto r : ok) dispatch(r, in);
}

void Simulator::mobility_tick(std::int64_t slot_number) {
  const auto& pc = setup_.protocol;
  queue_.push(now_ + pc.slot_duration, event::MobilityTick{slot_number + 1});
  if (slot_number > 0) {
    const double dt = to_seconds(pc.slot_duration);
    for (auto& b : bodies_) b.x = advance_position(b.x, b.direction, setup_.scenario.speed, dt, geo_.length);
  }
  if (setup_.kind != ProtocolKind::BaselineTdma) return;
  const auto slot = static_cast<int>(slot_number % pc.slots_per_frame);
  const auto frame = slot_number / pc.slots_per_frame;
  for (auto i : baseline_by_slot_[static_cast<std::size_t>(slot)]) dispatch(i, input::SlotTick{slot, frame});
}

}  // namespace vanetmac
