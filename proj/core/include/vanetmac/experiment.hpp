#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vanetmac/metrics.hpp"
#include "vanetmac/scenario.hpp"
#include "vanetmac/simulator.hpp"

namespace vanetmac {

/// A sweep: every protocol at every AO point with every seed. `scenario`
/// supplies everything except n_vehicles and seed, which the sweep sets.
struct ExperimentConfig {
  std::vector<ProtocolKind> protocols{ProtocolKind::CfMac, ProtocolKind::IMac, ProtocolKind::BaselineTdma};
  std::vector<double> ao_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::uint64_t> seeds = default_seeds();
  ScenarioConfig scenario;
  std::filesystem::path output = "results";
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  static std::vector<std::uint64_t> default_seeds();
};

/// Parses the flat `key = value` format. Blank lines and `#` comments are
/// skipped. Scenario keys may carry a `scenario.` prefix. Lists are comma
/// separated; numeric lists also accept `a..b` and `a..b step s`.
///
///   protocols = CF_MAC, I_MAC
///   ao_grid   = 0.1..1.0 step 0.1
///   seeds     = 1..20
///   scenario.sim_duration = 60
///
/// Throws ConfigError for unknown, repeated or invalid keys.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Vehicle count and seed for one sweep point.
ScenarioConfig scenario_for(const ScenarioConfig& base, double ao, std::uint64_t seed);

struct RunResult {
  MetricsReport report;
  RunStats stats;
};

/// One complete run. `extra` sinks (may be empty) observe the simulation too.
RunResult run_one(ProtocolKind kind, double ao, std::uint64_t seed, const ScenarioConfig& base,
                  const std::vector<TraceSink*>& extra = {});

struct RunFailure {
  std::string protocol;
  double ao = 0.0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SummaryRow {
  std::string protocol;
  double ao = 0.0;
  std::string metric;
  double mean = 0.0;
  /// Sample standard deviation; 0 for a single seed.
  double stddev = 0.0;
  std::size_t n_seeds = 0;
};

struct SweepResult {
  /// Sorted by (protocol, ao, seed).
  std::vector<MetricsReport> rows;
  std::vector<RunFailure> failures;
  std::vector<SummaryRow> summary;
};

struct SweepOptions {
  /// When set, a reception trace per run is written here.
  std::optional<std::filesystem::path> trace_dir;
  /// Called after each run from the worker that finished it (serialised).
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Runs every (protocol, ao, seed) triple. A failing run is recorded in
/// `failures` and the rest of the sweep continues.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts = {});

/// Per-(protocol, ao) mean and sample standard deviation of each rate.
std::vector<SummaryRow> summarize(const std::vector<MetricsReport>& rows);

/// Trace file name for one run, e.g. "trace_I_MAC_ao1_seed7.csv".
std::string trace_file_name(ProtocolKind kind, double ao, std::uint64_t seed);

/// AO as written in CSV files ("%g").
std::string format_ao(double ao);

inline constexpr std::string_view kResultsHeader =
    "protocol,ao,seed,merging_rate,access_rate,loss_rate,sent,delivered,collided,faded,dropped_overflow";
inline constexpr std::string_view kSummaryHeader = "protocol,ao,metric,mean,stddev,n_seeds";

void emit_csv(const SweepResult& result, std::ostream& os);
void emit_summary(const SweepResult& result, std::ostream& os);
/// Throw std::runtime_error if `path` cannot be written.
void emit_csv(const SweepResult& result, const std::filesystem::path& path);
void emit_summary(const SweepResult& result, const std::filesystem::path& path);

/// Reads a results.csv back. Throws ParseError on a malformed line.
std::vector<MetricsReport> read_results_csv(std::istream& is);

}  // namespace vanetmac
