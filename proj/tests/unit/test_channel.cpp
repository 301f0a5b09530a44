#include <random>

#include "doctest.h"
#include "vanetmac/channel.hpp"
#include "vanetmac/error.hpp"

using namespace vanetmac;

namespace {

// Independent estimate: received SNR is mean_snr(d) times a unit-mean Gamma(m, 1/m) power gain.
double monte_carlo_success(double d, const ChannelModel& ch, int draws, std::uint64_t seed) {
  const double m = ch.shape_at(d);
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> gain(m, 1.0 / m);
  const double mean = ch.mean_snr(d);
  int ok = 0;
  for (int i = 0; i < draws; ++i) ok += mean * gain(gen) > ch.threshold;
  return static_cast<double>(ok) / draws;
}

}  // namespace

TEST_CASE("calibration fixes the probability at the range edge") {
  const auto ch = ChannelModel::calibrated(300.0);
  CHECK(nakagami_success_prob(300.0, ch) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(nakagami_success_prob(0.01, ch) >= 0.999);
  CHECK(nakagami_success_prob(0.0, ch) == nakagami_success_prob(ch.ref_distance, ch));
  CHECK(nakagami_success_prob(-3.0, ch) == nakagami_success_prob(ch.ref_distance, ch));
}

TEST_CASE("fading bands") {
  const auto ch = ChannelModel::calibrated(300.0);
  CHECK(ch.shape_at(50.0) == 3.0);
  CHECK(ch.shape_at(100.0) == 3.0);
  CHECK(ch.shape_at(150.0) == 1.5);
  CHECK(ch.shape_at(250.0) == 1.0);
}

TEST_CASE("success probability agrees with a Monte Carlo estimate") {
  const auto ch = ChannelModel::calibrated(300.0);
  std::uint64_t seed = 1;
  for (double d : {30.0, 100.0, 200.0, 300.0}) {
    CAPTURE(d);
    const double mc = monte_carlo_success(d, ch, 1'000'000, seed++);
    CHECK(std::abs(nakagami_success_prob(d, ch) - mc) <= 0.005);
  }
}

TEST_CASE("success probability is nonincreasing in distance") {
  const auto ch = ChannelModel::calibrated(300.0);
  double prev = 1.0;
  for (int i = 0; i <= 300; ++i) {
    const double p = nakagami_success_prob(i * 1.0, ch);
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("channel validation names the field") {
  auto ch = ChannelModel::calibrated(300.0);
  ch.alpha = 0.0;
  CHECK_THROWS_AS(ch.validate(), ConfigError);
  ch = ChannelModel::calibrated(300.0);
  ch.bands = {{200.0, 1.0}, {100.0, 3.0}};
  CHECK_THROWS_AS(ch.validate(), ConfigError);
  ch = ChannelModel::calibrated(300.0);
  ch.bands = {{1e300, 0.4}};
  CHECK_THROWS_AS(ch.validate(), ConfigError);
}

TEST_CASE("resolve_reception") {
  auto ch = ChannelModel::calibrated(300.0);
  ch.fading = false;
  DeterministicRng rng(1);
  CHECK(resolve_reception(50.0, false, 0, ch, rng) == Outcome::Success);
  CHECK(resolve_reception(50.0, false, 1, ch, rng) == Outcome::Collided);
  CHECK(resolve_reception(50.0, true, 0, ch, rng) == Outcome::NotReceived);
  CHECK(resolve_reception(301.0, false, 0, ch, rng) == Outcome::NotReceived);
}

TEST_CASE("deliver") {
  const HighwayGeometry geo{2000.0, 10.0};
  auto ch = ChannelModel::calibrated(300.0);
  DeterministicRng rng(3);

  SUBCASE("single sender, no fading") {
    ch.fading = false;
    std::vector<VehicleBody> v{{{}, 0.0, 0, 1}, {{}, 50.0, 0, 1}};
    std::vector<Transmission> tx{{0, SimTime{0}, SimTime{2500}}};
    const auto out = deliver(tx, v, geo, ch, rng);
    REQUIRE(out.size() == 1);
    CHECK(out[0].receiver == 1);
    CHECK(out[0].outcome == Outcome::Success);
  }
  SUBCASE("two overlapping senders in range collide whatever the fading") {
    std::vector<VehicleBody> v{{{}, 0.0, 0, 1}, {{}, 100.0, 0, 1}, {{}, 200.0, 0, 1}};
    std::vector<Transmission> tx{{0, SimTime{0}, SimTime{2500}}, {2, SimTime{1000}, SimTime{16}}};
    for (int i = 0; i < 50; ++i) {
      for (const auto& r : deliver(tx, v, geo, ch, rng)) {
        if (r.receiver == 1) CHECK(r.outcome == Outcome::Collided);
      }
    }
  }
  SUBCASE("a far sender does not interfere") {
    std::vector<VehicleBody> v{{{}, 0.0, 0, 1}, {{}, 100.0, 0, 1}, {{}, 1000.0, 0, 1}};
    std::vector<Transmission> tx{{0, SimTime{0}, SimTime{2500}}, {2, SimTime{0}, SimTime{2500}}};
    int success = 0, faded = 0;
    for (int i = 0; i < 2000; ++i) {
      for (const auto& r : deliver(tx, v, geo, ch, rng)) {
        if (r.transmission != 0 || r.receiver != 1) continue;
        REQUIRE(r.outcome != Outcome::Collided);
        success += r.outcome == Outcome::Success;
        faded += r.outcome == Outcome::Faded;
      }
    }
    CHECK(success + faded == 2000);
    CHECK(static_cast<double>(success) / 2000 == doctest::Approx(nakagami_success_prob(100.0, ch)).epsilon(0.03));
  }
  SUBCASE("a single transmission never collides") {
    DeterministicRng placement(4);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<VehicleBody> v;
      for (int i = 0; i < 10; ++i) v.push_back({{}, placement.uniform01() * 2000.0, static_cast<int>(placement.uniform_below(2)), 1});
      std::vector<Transmission> tx{{placement.uniform_below(10), SimTime{0}, SimTime{2500}}};
      for (const auto& r : deliver(tx, v, geo, ch, rng)) CHECK(r.outcome != Outcome::Collided);
    }
  }
}
