#include "vanetmac/channel.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "vanetmac/error.hpp"

namespace vanetmac {

ChannelModel ChannelModel::calibrated(double range, double prob_at_range) {
  ChannelModel ch;
  ch.range = range;
  const double m = ch.shape_at(range);
  // Q(m, x0) = p  =>  mean_snr(range) = m * threshold / x0.
  const double x0 = boost::math::gamma_q_inv(m, prob_at_range);
  const double snr_at_range = m * ch.threshold / x0;
  ch.ref_snr = snr_at_range * std::pow(range / ch.ref_distance, ch.alpha);
  return ch;
}

double ChannelModel::shape_at(double d) const {
  for (const auto& b : bands) {
    if (d <= b.max_distance) return b.m;
  }
  return bands.back().m;
}

double ChannelModel::mean_snr(double d) const { return std::pow(ref_distance / d, alpha) * ref_snr; }

void ChannelModel::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha", "path-loss exponent must be positive");
  if (bands.empty()) throw ConfigError("bands", "at least one fading band is required");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (!(bands[i].m >= 0.5)) throw ConfigError("bands", "Nakagami shape must be at least 0.5");
    if (i > 0 && !(bands[i - 1].max_distance < bands[i].max_distance)) {
      throw ConfigError("bands", "band limits must be strictly increasing");
    }
  }
  if (!(range > 0.0)) throw ConfigError("range", "must be positive");
  if (!(threshold > 0.0) || !(ref_snr > 0.0) || !(ref_distance > 0.0)) {
    throw ConfigError("threshold", "threshold, reference SNR and reference distance must be positive");
  }
}

double nakagami_success_prob(double d, const ChannelModel& ch) {
  if (!ch.fading) return 1.0;
  if (!(d > 0.0)) d = ch.ref_distance;
  const double m = ch.shape_at(d);
  return boost::math::gamma_q(m, m * ch.threshold / ch.mean_snr(d));
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "SUCCESS";
    case Outcome::Collided: return "COLLIDED";
    case Outcome::Faded: return "FADED";
    case Outcome::NotReceived: return "NOT_RECEIVED";
  }
  return "?";
}

Outcome resolve_reception(double d, bool receiver_transmitting, std::size_t interferers, const ChannelModel& ch,
                          DeterministicRng& rng) {
  if (!in_range(d, ch.range) || receiver_transmitting) return Outcome::NotReceived;
  if (interferers > 0) return Outcome::Collided;
  const double p = nakagami_success_prob(d, ch);
  if (p >= 1.0) return Outcome::Success;
  return rng.uniform01() < p ? Outcome::Success : Outcome::Faded;
}

std::vector<ReceptionOutcome> deliver(std::span<const Transmission> transmissions, std::span<const VehicleBody> vehicles,
                                      const HighwayGeometry& geo, const ChannelModel& ch, DeterministicRng& rng) {
  std::vector<ReceptionOutcome> out;
  for (std::size_t t = 0; t < transmissions.size(); ++t) {
    const auto& tx = transmissions[t];
    for (std::size_t r = 0; r < vehicles.size(); ++r) {
      if (r == tx.sender) continue;
      const double d = distance(vehicles[tx.sender], vehicles[r], geo);
      bool busy = false;
      std::size_t interferers = 0;
      for (std::size_t o = 0; o < transmissions.size(); ++o) {
        if (o == t || !tx.overlaps(transmissions[o])) continue;
        const auto& other = transmissions[o];
        if (other.sender == r) {
          busy = true;
        } else if (other.sender != tx.sender && in_range(vehicles[other.sender], vehicles[r], geo, ch.range)) {
          ++interferers;
        }
      }
      out.push_back({t, r, resolve_reception(d, busy, interferers, ch, rng)});
    }
  }
  return out;
}

}  // namespace vanetmac
