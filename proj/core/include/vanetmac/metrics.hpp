#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vanetmac/protocol.hpp"
#include "vanetmac/trace.hpp"

namespace vanetmac {

struct AOParams {
  double n = 0.0;
  double range = 300.0;
  double length = 2000.0;
  double slots = 10.0;
};

/// N * R / (L * T). Throws std::invalid_argument if L * T is zero.
double area_occupancy(const AOParams& p);

/// Vehicle count whose area occupancy is closest to `ao`: round(ao * L * T / R).
/// Throws std::invalid_argument for negative `ao` or non-positive R.
int n_for_ao(double ao, double range, double length, int slots);

enum class CollisionClass : std::uint8_t { Access, Merging };
std::string_view to_string(CollisionClass c);

/// What the metrics layer remembers about finished frames and about pairs of
/// frames that collided with each other.
///
/// A frame is in its acquisition phase when it is an IBT or WTS, or the first
/// frame a baseline vehicle sends in its fixed slot. Two senders whose frames
/// collide start a conflict episode; it continues for as long as each new pair
/// of their frames collides and their previous frames collided with each
/// other too. An episode is ACCESS when it began with a frame in its
/// acquisition phase, MERGING when it began between established reservations.
class ReservationHistory {
 public:
  /// Finished frame; `access` marks an ACCESS collision at some receiver.
  void record(std::uint64_t frame, bool access);
  bool tracked(std::uint64_t frame) const;

  /// Acquisition phase as defined above.
  static bool in_acquisition_phase(const FrameRef& f);

  /// Acquisition attempt for the access-rate denominator: acquisition phase,
  /// or a fixed-slot frame whose previous frame was caught in an ACCESS
  /// collision (the slot was never cleanly acquired). Throws TraceError when
  /// the previous frame is untracked.
  bool acquisition_attempt(const FrameRef& f) const;

  /// Class of the collision `participants[0]` suffered at one receiver
  /// against the other participants. Remembers the pairs it sees at time `now`.
  /// Throws TraceError for fewer than two participants or an untracked
  /// previous frame.
  CollisionClass classify(std::span<const FrameRef> participants, SimTime now);

  /// Forgets pair records made before `horizon`.
  void prune(SimTime horizon);

 private:
  struct PairRecord {
    CollisionClass origin;
    SimTime seen;
  };
  struct PairHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
      return std::hash<std::uint64_t>{}(p.first * 0x9E3779B97F4A7C15ull ^ p.second);
    }
  };

  CollisionClass pair_origin(const FrameRef& a, const FrameRef& b, SimTime now);
  void require_prev(const FrameRef& f) const;

  // 0 = unknown, 1 = finished, 2 = finished with an ACCESS collision.
  std::vector<std::uint8_t> status_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, PairRecord, PairHash> pairs_;
};

/// Stateless wrapper: classifies against a copy of `history`.
CollisionClass classify_collision(std::span<const FrameRef> participants, const ReservationHistory& history);

/// Per-run rates and counters. Counts are reception pairs (frame, in-range
/// receiver) unless the name says frames.
struct MetricsReport {
  std::string protocol;
  double ao = 0.0;
  std::uint64_t seed = 0;
  /// MERGING-collided pairs over all pairs.
  double merging_rate = 0.0;
  /// ACCESS-collided pairs of acquisition attempts over all pairs of acquisition attempts.
  double access_rate = 0.0;
  /// (payload frames reaching nobody + queue drops) / (payload frames + queue drops).
  double loss_rate = 0.0;
  /// Frames with at least one in-range receiver.
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t collided = 0;
  std::uint64_t faded = 0;
  std::uint64_t dropped_overflow = 0;

  std::uint64_t frames = 0;
  std::uint64_t pairs = 0;
  std::uint64_t merging_pairs = 0;
  std::uint64_t access_pairs = 0;
  std::uint64_t acquisition_pairs = 0;
  std::uint64_t payload_frames = 0;
  std::uint64_t lost_frames = 0;
  std::uint64_t max_receivers = 0;
};

/// Streaming aggregation attached to a running simulation. Frames must arrive
/// in nondecreasing end time. Frames that started before `warmup` feed the
/// history but are not counted.
class MetricsAccumulator : public TraceSink {
 public:
  explicit MetricsAccumulator(SimTime warmup) : warmup_(warmup) {}

  void on_frame(const FrameOutcome& f) override;
  void on_drop(const DropRecord& d) override;

  /// Throws TraceError if nothing was counted after warmup.
  MetricsReport report() const;

 private:
  SimTime warmup_;
  SimTime last_prune_{0};
  ReservationHistory history_;
  MetricsReport r_;
};

/// Batch form over a recorded trace; frames are taken in (end, frame id)
/// order whatever their order in `trace`. Throws TraceError if no frame or
/// drop falls after warmup.
MetricsReport aggregate(const Trace& trace, double warmup);

}  // namespace vanetmac
