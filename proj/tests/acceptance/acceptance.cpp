// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include <boost/math/distributions/binomial.hpp>

#include "schedule_check.hpp"
#include "vanetmac/experiment.hpp"
#include "vanetmac/metrics.hpp"
#include "vanetmac/simulator.hpp"
#include "worked_example.hpp"

using namespace vanetmac;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Verdict& v, double secs) {
  std::printf("%s %d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

void run_criterion(int id, const char* name, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, v, seconds_since(t0));
}

std::string mac_list(const std::vector<MacAddress>& v) {
  std::string s;
  for (const auto& m : v) s += (s.empty() ? "" : ",") + format_mac(m).substr(0, 2);
  return s;
}

// ---------------------------------------------------------------- 1

Verdict worked_example() {
  constexpr double kLimit = 1.0;
  const auto t0 = Clock::now();
  const std::vector<MacAddress> want{fixture::kMac01, fixture::kMac00, fixture::kMac03};
  std::string detail;
  bool ok = true;
  auto check = [&](const char* label, const fixture::ExampleOutcome& out) {
    const auto order = out.round_data();
    const auto next = out.next_initiator();
    const bool good = order == want && next == fixture::kMac02;
    ok = ok && good;
    detail += std::string(detail.empty() ? "" : "; ") + label + " DATA " + mac_list(order) + " next " +
              (next ? format_mac(*next).substr(0, 2) : std::string("none"));
  };
  check("CF engine", fixture::engine_worked_example(ProtocolKind::CfMac));
  check("I engine", fixture::engine_worked_example(ProtocolKind::IMac));
  check("CF sim", fixture::sim_worked_example(ProtocolKind::CfMac));
  check("I sim", fixture::sim_worked_example(ProtocolKind::IMac));
  const double secs = seconds_since(t0);
  return {ok && secs < kLimit, detail};
}

// ---------------------------------------------------------------- 2 and 8

/// Streams transmissions for the schedule check and verifies that every
/// in-range receiver has exactly one outcome.
class RunAudit : public TraceSink {
 public:
  explicit RunAudit(SimTime warmup) : warmup_(warmup) {}

  void on_transmit(const TxRecord& tx) override {
    if (tx.kind == MessageKind::Data) txs.push_back(tx);
  }
  void on_frame(const FrameOutcome& f) override {
    std::set<std::uint32_t> seen;
    for (const auto& r : f.receptions) {
      if (!seen.insert(r.receiver).second || r.receiver == f.tx.sender) ++violations;
      const bool collided = r.outcome == Outcome::Collided;
      if (r.outcome == Outcome::NotReceived || collided != (r.participant_count >= 2)) ++violations;
    }
    if (f.tx.start < warmup_) return;
    ++frames;
    pairs += f.receptions.size();
    for (const auto& r : f.receptions) {
      success += r.outcome == Outcome::Success;
      collided += r.outcome == Outcome::Collided;
      faded += r.outcome == Outcome::Faded;
    }
  }
  void on_drop(const DropRecord& d) override { drops += d.time >= warmup_; }

  std::vector<TxRecord> txs;
  std::uint64_t violations = 0, frames = 0, pairs = 0, success = 0, collided = 0, faded = 0, drops = 0;

 private:
  SimTime warmup_;
};

struct AuditTotals {
  std::size_t runs = 0;
  std::size_t overlaps = 0;
  std::size_t conservation_failures = 0;
  std::uint64_t pairs = 0;
};

AuditTotals audit_runs(const std::vector<ProtocolKind>& kinds, std::size_t per_kind, std::uint64_t seed0) {
  AuditTotals t;
  std::mt19937_64 pick(seed0);
  for (auto kind : kinds) {
    for (std::size_t i = 0; i < per_kind; ++i) {
      ScenarioConfig sc;
      sc.seed = seed0 + i;
      sc.n_vehicles = static_cast<int>(std::uniform_int_distribution<int>(2, 67)(pick));
      auto setup = SimulationSetup::random(kind, sc);
      Simulator sim(setup);
      RunAudit audit(from_seconds(sc.warmup));
      MetricsAccumulator acc(from_seconds(sc.warmup));
      sim.add_sink(audit);
      sim.add_sink(acc);
      const auto stats = sim.run();
      const auto rep = acc.report();

      t.overlaps += fixture::intra_round_overlaps(audit.txs);
      const bool conserved =
          audit.violations == 0 && audit.pairs == audit.success + audit.collided + audit.faded &&
          stats.pairs_after_warmup == audit.pairs && stats.success_after_warmup == audit.success &&
          stats.collided_after_warmup == audit.collided && stats.faded_after_warmup == audit.faded &&
          stats.frames_after_warmup == audit.frames && stats.drops_after_warmup == audit.drops &&
          rep.pairs == audit.pairs && rep.delivered == audit.success && rep.collided == audit.collided &&
          rep.faded == audit.faded && rep.frames == audit.frames && rep.dropped_overflow == audit.drops &&
          rep.merging_pairs + rep.access_pairs <= rep.collided;
      t.conservation_failures += !conserved;
      t.pairs += audit.pairs;
      ++t.runs;
    }
  }
  return t;
}

AuditTotals schedule_runs;

Verdict schedule_safety() {
  constexpr double kLimit = 120.0;
  const auto t0 = Clock::now();
  schedule_runs = audit_runs({ProtocolKind::CfMac, ProtocolKind::IMac}, 50, 1000);
  const double secs = seconds_since(t0);
  return {schedule_runs.overlaps == 0 && secs < kLimit,
          std::to_string(schedule_runs.runs) + " runs, " + std::to_string(schedule_runs.overlaps) +
              " overlapping DATA pairs within a round"};
}

Verdict conservation() {
  const auto baseline = audit_runs({ProtocolKind::BaselineTdma}, 20, 2000);
  const auto runs = schedule_runs.runs + baseline.runs;
  const auto bad = schedule_runs.conservation_failures + baseline.conservation_failures;
  return {bad == 0 && runs == 120,
          std::to_string(runs) + " runs, " + std::to_string(schedule_runs.pairs + baseline.pairs) +
              " reception pairs, " + std::to_string(bad) + " runs with mismatched counts"};
}

// ---------------------------------------------------------------- 3

std::string results_csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  emit_csv(run_sweep(cfg), os);
  return os.str();
}

Verdict determinism() {
  ExperimentConfig cfg;
  cfg.ao_grid = {0.3, 1.0};
  cfg.seeds = {1, 17};
  const auto a = results_csv(cfg);
  const auto b = results_csv(cfg);
  cfg.threads = 1;
  const auto c = results_csv(cfg);
  const bool same = a == b && a == c;
  return {same && !a.empty(), std::to_string(std::count(a.begin(), a.end(), '\n') - 1) +
                                  " rows, reruns and single-threaded run byte-identical: " + (same ? "yes" : "no")};
}

// ---------------------------------------------------------------- 4

Verdict ao_formula() {
  const double ao = area_occupancy({100, 300, 2000, 10});
  const int n = n_for_ao(1.0, 300, 2000, 10);
  return {ao == 1.5 && n == 67, "area_occupancy(100,300,2000,10) = " + fmt("%g", ao) +
                                    ", n_for_ao(1.0) = " + std::to_string(n)};
}

// ---------------------------------------------------------------- 5 and 6

using Rows = std::vector<MetricsReport>;

std::map<std::uint64_t, double> per_seed(const Rows& rows, ProtocolKind kind, double ao,
                                         double MetricsReport::*field) {
  std::map<std::uint64_t, double> out;
  for (const auto& r : rows) {
    if (r.protocol == to_string(kind) && r.ao == ao) out[r.seed] = r.*field;
  }
  return out;
}

double mean_of(const std::map<std::uint64_t, double>& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return m.empty() ? NAN : s / static_cast<double>(m.size());
}

/// One-sided sign test of "lower < higher" over paired seeds; ties are dropped.
double sign_test_p(const std::map<std::uint64_t, double>& lower, const std::map<std::uint64_t, double>& higher) {
  int wins = 0, n = 0;
  for (const auto& [seed, lo] : lower) {
    const auto it = higher.find(seed);
    if (it == higher.end() || lo == it->second) continue;
    ++n;
    wins += lo < it->second;
  }
  if (n == 0) return 1.0;
  if (wins == 0) return 1.0;
  boost::math::binomial_distribution<> b(n, 0.5);
  return boost::math::cdf(boost::math::complement(b, wins - 1));
}

struct OrderingCheck {
  bool pass = true;
  std::string detail;
};

OrderingCheck ordering(const Rows& rows, double ao, double MetricsReport::*field, const char* label) {
  const auto i = per_seed(rows, ProtocolKind::IMac, ao, field);
  const auto c = per_seed(rows, ProtocolKind::CfMac, ao, field);
  const auto b = per_seed(rows, ProtocolKind::BaselineTdma, ao, field);
  const double mi = mean_of(i), mc = mean_of(c), mb = mean_of(b);
  const double p1 = sign_test_p(i, c), p2 = sign_test_p(c, b);
  OrderingCheck o;
  o.pass = mi < mc && mc < mb && p1 < 0.05 && p2 < 0.05;
  o.detail = std::string(label) + " I " + fmt("%.4f", mi) + " CF " + fmt("%.4f", mc) + " B " + fmt("%.4f", mb) +
             " (p " + fmt("%.2g", p1) + ", " + fmt("%.2g", p2) + ")";
  return o;
}

Rows run_rows(const std::vector<double>& ao_grid) {
  ExperimentConfig cfg;
  cfg.ao_grid = ao_grid;
  auto res = run_sweep(cfg);
  if (!res.failures.empty()) throw std::runtime_error(std::to_string(res.failures.size()) + " runs failed");
  return res.rows;
}

Verdict collision_ordering() {
  constexpr double kLimit = 300.0;
  constexpr double kMergingBand[2] = {0.01, 0.09};
  constexpr double kAccessBand[2] = {0.017, 0.15};
  const auto t0 = Clock::now();
  const auto rows = run_rows({1.0});
  const double secs = seconds_since(t0);

  const auto m = ordering(rows, 1.0, &MetricsReport::merging_rate, "merging");
  const auto a = ordering(rows, 1.0, &MetricsReport::access_rate, "access");
  const double im = mean_of(per_seed(rows, ProtocolKind::IMac, 1.0, &MetricsReport::merging_rate));
  const double ia = mean_of(per_seed(rows, ProtocolKind::IMac, 1.0, &MetricsReport::access_rate));
  const bool bands = im >= kMergingBand[0] && im <= kMergingBand[1] && ia >= kAccessBand[0] && ia <= kAccessBand[1];
  std::string detail = m.detail + "; " + a.detail + "; I-MAC within bands: " + (bands ? "yes" : "no");
  return {m.pass && a.pass && bands && secs < kLimit, detail};
}

Rows full_rows;
double full_sweep_secs = 0.0;

Verdict loss_thresholds() {
  constexpr double kLowAoLimit = 0.001;
  constexpr double kImacBand[2] = {0.005 / 3.0, 0.015};
  std::string detail;
  bool low_ok = true;
  double worst = 0.0, worst_ao = 0.0;
  for (double ao : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
    const double l = mean_of(per_seed(full_rows, ProtocolKind::IMac, ao, &MetricsReport::loss_rate));
    if (l > worst) worst = l, worst_ao = ao;
    low_ok = low_ok && l <= kLowAoLimit;
  }
  detail = "from the full sweep; I-MAC worst loss for AO <= 0.8: " + fmt("%.4f", worst) + " at AO " + fmt("%g", worst_ao);

  const double li = mean_of(per_seed(full_rows, ProtocolKind::IMac, 1.0, &MetricsReport::loss_rate));
  const double lc = mean_of(per_seed(full_rows, ProtocolKind::CfMac, 1.0, &MetricsReport::loss_rate));
  const double lb = mean_of(per_seed(full_rows, ProtocolKind::BaselineTdma, 1.0, &MetricsReport::loss_rate));
  const bool order_ok = li <= lc && lc <= lb;
  const bool band_ok = li >= kImacBand[0] && li <= kImacBand[1];
  detail += "; AO 1: I " + fmt("%.4f", li) + " CF " + fmt("%.4f", lc) + " B " + fmt("%.4f", lb) +
            ", ordered: " + (order_ok ? "yes" : "no") + ", I-MAC within band: " + (band_ok ? "yes" : "no");
  return {low_ok && order_ok && band_ok, detail};
}

// ---------------------------------------------------------------- 7

Verdict channel_oracle() {
  constexpr int kDraws = 1'000'000;
  constexpr double kTol = 0.005;
  const auto ch = ChannelModel::calibrated(300.0);
  double worst = 0.0;
  std::uint64_t seed = 7;
  for (double d : {30.0, 100.0, 200.0, 300.0}) {
    const double m = ch.shape_at(d);
    std::mt19937_64 gen(seed++);
    std::gamma_distribution<double> gain(m, 1.0 / m);
    const double mean = ch.mean_snr(d);
    int ok = 0;
    for (int i = 0; i < kDraws; ++i) ok += mean * gain(gen) > ch.threshold;
    worst = std::max(worst, std::abs(static_cast<double>(ok) / kDraws - nakagami_success_prob(d, ch)));
  }
  bool monotone = true;
  double prev = 1.0;
  for (int i = 1; i <= 300; ++i) {
    const double p = nakagami_success_prob(i, ch);
    monotone = monotone && p <= prev;
    prev = p;
  }
  return {worst <= kTol && monotone,
          "max |analytic - Monte Carlo| " + fmt("%.4f", worst) + ", monotone over 300 points: " + (monotone ? "yes" : "no")};
}

// ---------------------------------------------------------------- 9

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

Verdict full_sweep() {
  constexpr double kLimit = 300.0;
  const fs::path dir = fs::temp_directory_path() / "vanetmac-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  const auto res = run_sweep(cfg);
  emit_csv(res, dir / "results.csv");
  emit_summary(res, dir / "summary.csv");
  full_sweep_secs = seconds_since(t0);
  full_rows = res.rows;

  const std::regex result_row(R"((CF_MAC|I_MAC|BASELINE_TDMA),(0\.[1-9]|1),\d+,[01]\.\d{6},[01]\.\d{6},[01]\.\d{6},\d+,\d+,\d+,\d+,\d+)");
  const std::regex summary_row(R"((CF_MAC|I_MAC|BASELINE_TDMA),(0\.[1-9]|1),(merging_rate|access_rate|loss_rate),[01]\.\d{6},[01]\.\d{6},20)");
  const auto results = read_lines(dir / "results.csv");
  const auto summary = read_lines(dir / "summary.csv");
  bool schema = !results.empty() && results[0] == kResultsHeader && results.size() == 601 && !summary.empty() &&
                summary[0] == kSummaryHeader && summary.size() == 91;
  std::size_t bad_rows = 0;
  for (std::size_t i = 1; i < results.size(); ++i) bad_rows += !std::regex_match(results[i], result_row);
  for (std::size_t i = 1; i < summary.size(); ++i) bad_rows += !std::regex_match(summary[i], summary_row);
  schema = schema && bad_rows == 0 && res.failures.empty();

  return {schema && full_sweep_secs < kLimit,
          std::to_string(res.rows.size()) + " runs, " + std::to_string(res.failures.size()) + " failed, " +
              std::to_string(results.size() > 0 ? results.size() - 1 : 0) + " result rows, " +
              std::to_string(summary.size() > 0 ? summary.size() - 1 : 0) + " summary rows, " +
              std::to_string(bad_rows) + " malformed, sweep " + fmt("%.1f", full_sweep_secs) + " s"};
}

}  // namespace

int main() {
  run_criterion(1, "worked example", worked_example);
  run_criterion(2, "schedule safety", schedule_safety);
  run_criterion(3, "determinism", determinism);
  run_criterion(4, "AO formula", ao_formula);
  run_criterion(5, "collision ordering", collision_ordering);

  // 6 reads the full sweep, so 9 runs first; lines are still printed in order.
  const auto t9 = Clock::now();
  Verdict v9;
  try {
    v9 = full_sweep();
  } catch (const std::exception& e) {
    v9 = {false, std::string("exception: ") + e.what()};
  }
  const double s9 = seconds_since(t9);
  if (full_rows.empty()) {
    report(6, "packet loss", {false, "full sweep produced no rows"}, 0.0);
  } else {
    run_criterion(6, "packet loss", loss_thresholds);
  }
  run_criterion(7, "channel oracle", channel_oracle);
  run_criterion(8, "conservation", conservation);
  report(9, "full sweep", v9, s9);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
