#include <benchmark/benchmark.h>

#include "vanetmac/channel.hpp"
#include "vanetmac/event_queue.hpp"
#include "vanetmac/experiment.hpp"
#include "vanetmac/random.hpp"

using namespace vanetmac;

static void BM_EventQueue(benchmark::State& state) {
  const auto n = state.range(0);
  DeterministicRng rng(1);
  for (auto _ : state) {
    EventQueue<int> q;
    for (std::int64_t i = 0; i < n; ++i) q.push(SimTime{static_cast<std::int64_t>(rng.uniform_below(1'000'000))}, 0);
    while (auto e = q.pop_next()) benchmark::DoNotOptimize(e->time);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EventQueue)->Arg(1'000)->Arg(100'000);

static void BM_NakagamiSuccessProb(benchmark::State& state) {
  const auto ch = ChannelModel::calibrated(300.0);
  double d = 0.0;
  for (auto _ : state) {
    d = d >= 300.0 ? 0.5 : d + 0.37;
    benchmark::DoNotOptimize(nakagami_success_prob(d, ch));
  }
}
BENCHMARK(BM_NakagamiSuccessProb);

static void BM_Deliver(benchmark::State& state) {
  const HighwayGeometry geo;
  const auto ch = ChannelModel::calibrated(300.0);
  DeterministicRng rng(2);
  std::vector<VehicleBody> v;
  for (int i = 0; i < 67; ++i) v.push_back({MacAddress::from_u64(i), rng.uniform01() * 2000.0, i % 2, i % 2 ? -1 : 1});
  std::vector<Transmission> tx{{0, SimTime{0}, SimTime{2500}}, {5, SimTime{100}, SimTime{16}}, {9, SimTime{2000}, SimTime{200}}};
  for (auto _ : state) benchmark::DoNotOptimize(deliver(tx, v, geo, ch, rng));
}
BENCHMARK(BM_Deliver);

static void BM_Run(benchmark::State& state) {
  const auto kind = static_cast<ProtocolKind>(state.range(0));
  ScenarioConfig base;
  base.sim_duration = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_one(kind, 1.0, 1, base).report.pairs);
  state.SetLabel(std::string(to_string(kind)) + ", AO 1, 10 s simulated");
}
BENCHMARK(BM_Run)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
