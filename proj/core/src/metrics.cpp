#include "vanetmac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vanetmac/error.hpp"

namespace vanetmac {

double area_occupancy(const AOParams& p) {
  const double denom = p.length * p.slots;
  if (denom == 0.0) throw std::invalid_argument("area occupancy: highway length times slots is zero");
  return p.n * p.range / denom;
}

int n_for_ao(double ao, double range, double length, int slots) {
  if (!(ao >= 0.0)) throw std::invalid_argument("n_for_ao: area occupancy must be non-negative");
  if (!(range > 0.0)) throw std::invalid_argument("n_for_ao: range must be positive");
  return static_cast<int>(std::lround(ao * length * slots / range));
}

std::string_view to_string(CollisionClass c) { return c == CollisionClass::Access ? "ACCESS" : "MERGING"; }

void ReservationHistory::record(std::uint64_t frame, bool access) {
  if (frame >= status_.size()) status_.resize(std::max<std::size_t>(frame + 1, status_.size() * 2), 0);
  status_[frame] = access ? 2 : 1;
}

bool ReservationHistory::tracked(std::uint64_t frame) const {
  return frame < status_.size() && status_[frame] != 0;
}

void ReservationHistory::require_prev(const FrameRef& f) const {
  if (f.prev_frame && !tracked(*f.prev_frame)) {
    throw TraceError("frame " + std::to_string(f.frame) + ": previous frame " + std::to_string(*f.prev_frame) +
                     " is not in the trace");
  }
}

bool ReservationHistory::in_acquisition_phase(const FrameRef& f) {
  switch (f.claim) {
    case SlotClaim::Acquisition: return true;
    case SlotClaim::Reserved: return false;
    case SlotClaim::FixedAssignment: return !f.prev_frame;
  }
  return true;
}

bool ReservationHistory::acquisition_attempt(const FrameRef& f) const {
  require_prev(f);
  if (in_acquisition_phase(f)) return true;
  return f.claim == SlotClaim::FixedAssignment && status_[*f.prev_frame] == 2;
}

CollisionClass ReservationHistory::pair_origin(const FrameRef& a, const FrameRef& b, SimTime now) {
  const auto key = std::minmax(a.frame, b.frame);
  if (const auto it = pairs_.find(key); it != pairs_.end()) return it->second.origin;

  CollisionClass origin;
  const auto prev = a.prev_frame && b.prev_frame ? pairs_.find(std::minmax(*a.prev_frame, *b.prev_frame))
                                                 : pairs_.end();
  if (prev != pairs_.end()) {
    origin = prev->second.origin;
  } else {
    origin = in_acquisition_phase(a) || in_acquisition_phase(b) ? CollisionClass::Access : CollisionClass::Merging;
  }
  pairs_.emplace(key, PairRecord{origin, now});
  return origin;
}

CollisionClass ReservationHistory::classify(std::span<const FrameRef> participants, SimTime now) {
  if (participants.size() < 2) throw TraceError("a collision needs at least two participants");
  for (const auto& p : participants) require_prev(p);
  auto cls = CollisionClass::Merging;
  for (std::size_t i = 1; i < participants.size(); ++i) {
    if (pair_origin(participants[0], participants[i], now) == CollisionClass::Access) cls = CollisionClass::Access;
  }
  return cls;
}

void ReservationHistory::prune(SimTime horizon) {
  std::erase_if(pairs_, [&](const auto& kv) { return kv.second.seen < horizon; });
}

CollisionClass classify_collision(std::span<const FrameRef> participants, const ReservationHistory& history) {
  ReservationHistory scratch = history;
  return scratch.classify(participants, SimTime{0});
}

namespace {

// Pair episodes older than this are not continued; at 10 slots of 2.5 ms a
// fixed-slot sender transmits 40 times within it.
constexpr SimTime kPairMemory{1'000'000};

}  // namespace

void MetricsAccumulator::on_frame(const FrameOutcome& f) {
  const SimTime now = f.tx.end;
  if (now - last_prune_ > kPairMemory) {
    history_.prune(now - kPairMemory);
    last_prune_ = now;
  }

  // Every participant started before this frame ended, so its previous frame
  // has already been recorded.
  const bool counted = f.tx.start >= warmup_;
  const bool attempt = history_.acquisition_attempt(f.tx.ref());
  bool access = false;
  bool reached = false;
  for (const auto& rec : f.receptions) {
    switch (rec.outcome) {
      case Outcome::Success:
        reached = true;
        if (counted) ++r_.delivered;
        break;
      case Outcome::Faded:
        if (counted) ++r_.faded;
        break;
      case Outcome::Collided: {
        const auto cls = history_.classify(f.participants_of(rec), now);
        if (cls == CollisionClass::Access) access = true;
        if (counted) {
          ++r_.collided;
          if (cls == CollisionClass::Merging) {
            ++r_.merging_pairs;
          } else if (attempt) {
            ++r_.access_pairs;
          }
        }
        break;
      }
      case Outcome::NotReceived:
        throw TraceError("reception records only cover in-range, listening receivers");
    }
  }
  history_.record(f.tx.frame, access);
  if (!counted) return;

  ++r_.frames;
  const auto receivers = f.in_range_receivers();
  if (receivers == 0) return;
  ++r_.sent;
  r_.pairs += receivers;
  if (attempt) r_.acquisition_pairs += receivers;
  r_.max_receivers = std::max<std::uint64_t>(r_.max_receivers, receivers);
  if (f.tx.kind == MessageKind::Data && f.tx.payload) {
    ++r_.payload_frames;
    if (!reached) ++r_.lost_frames;
  }
}

void MetricsAccumulator::on_drop(const DropRecord& d) {
  if (d.time >= warmup_) ++r_.dropped_overflow;
}

MetricsReport MetricsAccumulator::report() const {
  if (r_.frames == 0 && r_.dropped_overflow == 0) throw TraceError("no frames or drops after warmup");
  MetricsReport out = r_;
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  out.merging_rate = ratio(out.merging_pairs, out.pairs);
  out.access_rate = ratio(out.access_pairs, out.acquisition_pairs);
  out.loss_rate = ratio(out.lost_frames + out.dropped_overflow, out.payload_frames + out.dropped_overflow);
  return out;
}

MetricsReport aggregate(const Trace& trace, double warmup) {
  std::vector<const FrameOutcome*> order;
  order.reserve(trace.frames.size());
  for (const auto& f : trace.frames) order.push_back(&f);
  std::sort(order.begin(), order.end(), [](const FrameOutcome* a, const FrameOutcome* b) {
    return a->tx.end != b->tx.end ? a->tx.end < b->tx.end : a->tx.frame < b->tx.frame;
  });
  MetricsAccumulator acc(from_seconds(warmup));
  for (const auto* f : order) acc.on_frame(*f);
  for (const auto& d : trace.drops) acc.on_drop(d);
  return acc.report();
}

}  // namespace vanetmac
