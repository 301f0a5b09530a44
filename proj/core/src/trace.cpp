#include "vanetmac/trace.hpp"

#include <algorithm>
#include <ostream>

namespace vanetmac {

bool FrameOutcome::collided() const {
  return std::any_of(receptions.begin(), receptions.end(),
                     [](const ReceptionRecord& r) { return r.outcome == Outcome::Collided; });
}

bool FrameOutcome::delivered() const {
  return std::any_of(receptions.begin(), receptions.end(),
                     [](const ReceptionRecord& r) { return r.outcome == Outcome::Success; });
}

ReceptionTraceWriter::ReceptionTraceWriter(std::ostream& os) : os_(os) {
  os_ << "time,sender,receiver,msg_kind,outcome\n";
}

void ReceptionTraceWriter::on_frame(const FrameOutcome& f) {
  const auto sender = format_mac(f.tx.sender_mac);
  for (const auto& r : f.receptions) {
    os_ << f.tx.end.count() << ',' << sender << ',' << format_mac(r.receiver_mac) << ',' << to_string(f.tx.kind)
        << ',' << to_string(r.outcome) << '\n';
  }
}

ActionTraceWriter::ActionTraceWriter(std::ostream& os, SimTime slot_duration, int slots_per_frame)
    : os_(os), slot_(slot_duration), slots_per_frame_(slots_per_frame) {
  os_ << "time,node,action,msg_kind,slot,frame\n";
}

void ActionTraceWriter::on_action(SimTime now, std::uint32_t, const MacAddress& mac, const NodeAction& a) {
  std::string_view kind;
  SimTime at = now;
  if (const auto* tx = std::get_if<action::Transmit>(&a)) {
    kind = to_string(tx->msg.kind);
    at = tx->at;
  }
  const auto slot_number = at / slot_;
  os_ << at.count() << ',' << format_mac(mac) << ',' << action_name(a) << ',' << kind << ','
      << slot_number % slots_per_frame_ << ',' << slot_number / slots_per_frame_ << '\n';
}

}  // namespace vanetmac
