#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vanetmac/channel.hpp"
#include "vanetmac/protocol.hpp"

namespace vanetmac {

/// A transmission as seen from a collision: enough to decide whether its
/// sender held a reservation at the time.
struct FrameRef {
  std::uint64_t frame = 0;
  std::uint32_t sender = 0;
  SlotClaim claim = SlotClaim::Acquisition;
  /// The sender's previous frame, if any.
  std::optional<std::uint64_t> prev_frame;
};

struct TxRecord {
  std::uint64_t frame = 0;
  std::uint32_t sender = 0;
  MacAddress sender_mac;
  MessageKind kind = MessageKind::Beacon;
  SlotClaim claim = SlotClaim::Acquisition;
  std::optional<PayloadId> payload;
  SimTime start{0};
  SimTime end{0};
  std::optional<std::uint64_t> prev_frame;
  /// IBT and DATA: round identity (initiator, first DATA slot start).
  std::optional<MacAddress> round_initiator;
  SimTime round_start{0};

  FrameRef ref() const { return {frame, sender, claim, prev_frame}; }
};

struct ReceptionRecord {
  std::uint32_t receiver = 0;
  MacAddress receiver_mac;
  Outcome outcome = Outcome::NotReceived;
  /// Slice of FrameOutcome::participants listing every frame in the collision
  /// (this one included). Empty unless outcome is Collided.
  std::uint32_t first_participant = 0;
  std::uint32_t participant_count = 0;
};

/// A completed frame with one reception per in-range, non-transmitting vehicle.
struct FrameOutcome {
  TxRecord tx;
  std::vector<ReceptionRecord> receptions;
  std::vector<FrameRef> participants;

  std::size_t in_range_receivers() const { return receptions.size(); }
  bool collided() const;
  bool delivered() const;
  std::span<const FrameRef> participants_of(const ReceptionRecord& r) const {
    return std::span<const FrameRef>(participants).subspan(r.first_participant, r.participant_count);
  }
};

struct DropRecord {
  SimTime time{0};
  std::uint32_t node = 0;
  PayloadId payload = 0;
};

/// Observer of a simulation run. Frames are reported when they end, in
/// nondecreasing end time.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_transmit(const TxRecord&) {}
  virtual void on_frame(const FrameOutcome&) {}
  virtual void on_drop(const DropRecord&) {}
  virtual void on_action(SimTime, std::uint32_t /*node*/, const MacAddress&, const NodeAction&) {}
  /// Action reporting is skipped unless some sink asks for it.
  virtual bool wants_actions() const { return false; }
};

struct Trace {
  std::vector<FrameOutcome> frames;
  std::vector<DropRecord> drops;
};

/// Keeps the whole run in memory.
class TraceRecorder : public TraceSink {
 public:
  void on_transmit(const TxRecord& tx) override { transmissions_.push_back(tx); }
  void on_frame(const FrameOutcome& f) override { trace_.frames.push_back(f); }
  void on_drop(const DropRecord& d) override { trace_.drops.push_back(d); }

  const Trace& trace() const { return trace_; }
  const std::vector<TxRecord>& transmissions() const { return transmissions_; }

 private:
  Trace trace_;
  std::vector<TxRecord> transmissions_;
};

/// "time,sender,receiver,msg_kind,outcome" per in-range reception; time is the
/// frame end in integer microseconds.
class ReceptionTraceWriter : public TraceSink {
 public:
  explicit ReceptionTraceWriter(std::ostream& os);
  void on_frame(const FrameOutcome& f) override;

 private:
  std::ostream& os_;
};

/// "time,node,action,msg_kind,slot,frame" per node action. TRANSMIT rows carry
/// the scheduled transmission time, other rows the decision time.
class ActionTraceWriter : public TraceSink {
 public:
  ActionTraceWriter(std::ostream& os, SimTime slot_duration, int slots_per_frame);
  void on_action(SimTime now, std::uint32_t node, const MacAddress& mac, const NodeAction& a) override;
  bool wants_actions() const override { return true; }

 private:
  std::ostream& os_;
  SimTime slot_;
  int slots_per_frame_;
};

}  // namespace vanetmac
