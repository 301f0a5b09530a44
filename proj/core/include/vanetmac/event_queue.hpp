#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "vanetmac/sim_time.hpp"

namespace vanetmac {

template <class Payload>
struct TimedEvent {
  SimTime time;
  std::uint64_t seq;
  Payload payload;
};

/// Min-queue on (time, seq). `seq` is assigned at push, so events sharing a
/// timestamp pop in insertion order.
template <class Payload>
class EventQueue {
 public:
  using Event = TimedEvent<Payload>;

  std::uint64_t push(SimTime time, Payload payload) {
    const auto seq = next_seq_++;
    heap_.push(Event{time, seq, std::move(payload)});
    return seq;
  }

  /// Earliest event, or nullopt once the queue has drained (end of simulation).
  std::optional<Event> pop_next() {
    if (heap_.empty()) return std::nullopt;
    // top() is const; the element is discarded right after, so moving out is safe.
    Event e = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    return e;
  }

  const Event* peek() const { return heap_.empty() ? nullptr : &heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace vanetmac
