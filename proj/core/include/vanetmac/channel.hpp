#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "vanetmac/mobility.hpp"
#include "vanetmac/random.hpp"
#include "vanetmac/sim_time.hpp"

namespace vanetmac {

/// Nakagami shape `m` applies to distances up to and including `max_distance`.
struct FadingBand {
  double max_distance;
  double m;
};

/// Receiver-side channel: path loss with exponent `alpha`, Nakagami-m fading
/// banded by distance, and a reception threshold. Mean SNR at distance d is
/// (ref_distance / d)^alpha * ref_snr, in units of the threshold.
struct ChannelModel {
  double alpha = 2.0;
  std::vector<FadingBand> bands{{100.0, 3.0}, {200.0, 1.5}, {1e300, 1.0}};
  double threshold = 1.0;
  double range = 300.0;
  double ref_distance = 1.0;
  double ref_snr = 1.0;
  /// When false every in-range single reception succeeds.
  bool fading = true;

  /// Model with ref_snr chosen so that the success probability at `range` is `prob_at_range`.
  static ChannelModel calibrated(double range, double prob_at_range = 0.5);

  double shape_at(double d) const;
  double mean_snr(double d) const;
  /// Throws ConfigError if alpha <= 0, any m < 0.5, bands unsorted, or range <= 0.
  void validate() const;
};

/// P(received SNR > threshold) under Nakagami-m fading: Q(m, m * threshold / mean_snr(d)),
/// Q being the regularised upper incomplete gamma function. d <= 0 is treated as ref_distance.
double nakagami_success_prob(double d, const ChannelModel& ch);

enum class Outcome : std::uint8_t { Success, Collided, Faded, NotReceived };
std::string_view to_string(Outcome o);

struct Transmission {
  std::size_t sender;
  SimTime start;
  SimTime airtime;

  SimTime end() const { return start + airtime; }
  bool overlaps(const Transmission& o) const { return start < o.end() && o.start < end(); }
};

struct ReceptionOutcome {
  std::size_t transmission;
  std::size_t receiver;
  Outcome outcome;
};

/// Outcome of one frame at one receiver. `interferers` counts other overlapping
/// transmissions whose senders are in range of the receiver; `uniform` is a
/// [0,1) draw consumed only when exactly one frame is on the air.
Outcome resolve_reception(double d, bool receiver_transmitting, std::size_t interferers, const ChannelModel& ch,
                          DeterministicRng& rng);

/// Receiver-side collision channel over a batch of transmissions. For every
/// transmission and every other vehicle: out of range or half-duplex ->
/// NotReceived; two or more overlapping in-range frames -> Collided; otherwise
/// Success with the Nakagami probability, else Faded. Results are ordered by
/// (transmission, receiver).
std::vector<ReceptionOutcome> deliver(std::span<const Transmission> transmissions, std::span<const VehicleBody> vehicles,
                                      const HighwayGeometry& geo, const ChannelModel& ch, DeterministicRng& rng);

}  // namespace vanetmac
