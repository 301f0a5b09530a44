#include "vanetmac/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "vanetmac/error.hpp"

namespace vanetmac {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d)) {
    throw ConfigError(key, "'" + s + "' is not a number");
  }
  return d;
}

std::uint64_t to_u64(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(key, "'" + std::string(v) + "' is not a non-negative integer");
  }
  return out;
}

int to_int(const std::string& key, std::string_view v) {
  const auto u = to_u64(key, v);
  if (u > 1'000'000'000) throw ConfigError(key, "value too large");
  return static_cast<int>(u);
}

/// Round away accumulated step error so 0.1 + 2 * 0.1 prints and compares as 0.3.
double snap(double x) { return std::round(x * 1e9) / 1e9; }

std::vector<double> parse_real_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  if (const auto dots = v.find(".."); dots != std::string_view::npos && v.find(',') == std::string_view::npos) {
    const double a = to_double(key, trim(v.substr(0, dots)));
    auto rest = trim(v.substr(dots + 2));
    double step = 1.0;
    if (const auto sp = rest.find("step"); sp != std::string_view::npos) {
      step = to_double(key, trim(rest.substr(sp + 4)));
      rest = trim(rest.substr(0, sp));
    }
    const double b = to_double(key, rest);
    if (!(step > 0.0) || b < a) throw ConfigError(key, "range needs a <= b and a positive step");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(snap(a + static_cast<double>(i) * step));
    return out;
  }
  for (auto item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& key, std::string_view v) {
  std::vector<std::uint64_t> out;
  if (const auto dots = v.find(".."); dots != std::string_view::npos && v.find(',') == std::string_view::npos) {
    const auto a = to_u64(key, trim(v.substr(0, dots)));
    auto rest = trim(v.substr(dots + 2));
    std::uint64_t step = 1;
    if (const auto sp = rest.find("step"); sp != std::string_view::npos) {
      step = to_u64(key, trim(rest.substr(sp + 4)));
      rest = trim(rest.substr(0, sp));
    }
    const auto b = to_u64(key, rest);
    if (step == 0 || b < a) throw ConfigError(key, "range needs a <= b and a positive step");
    for (auto s = a; s <= b; s += step) {
      out.push_back(s);
      if (b - s < step) break;
    }
    return out;
  }
  for (auto item : split(v, ',')) out.push_back(to_u64(key, item));
  return out;
}

bool set_scenario_key(ScenarioConfig& s, const std::string& key, std::string_view v) {
  if (key == "highway_length") s.highway_length = to_double(key, v);
  else if (key == "lanes") s.lanes = to_int(key, v);
  else if (key == "speed") s.speed = to_double(key, v);
  else if (key == "speed_kmh") s.speed = to_double(key, v) / 3.6;
  else if (key == "range") s.range = to_double(key, v);
  else if (key == "lane_gap") s.lane_gap = to_double(key, v);
  else if (key == "slots_per_frame") s.slots_per_frame = to_int(key, v);
  else if (key == "slot_duration") s.slot_duration = to_double(key, v);
  else if (key == "beacon_interval") s.beacon_interval = to_double(key, v);
  else if (key == "sim_duration") s.sim_duration = to_double(key, v);
  else if (key == "warmup") s.warmup = to_double(key, v);
  else return false;
  return true;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::default_seeds() {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 20; ++i) s.push_back(i);
  return s;
}

void ExperimentConfig::validate() const {
  if (protocols.empty()) throw ConfigError("protocols", "at least one protocol is required");
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (ao_grid.empty()) throw ConfigError("ao_grid", "at least one AO point is required");
  scenario.validate();
  for (double ao : ao_grid) {
    if (!(ao > 0.0 && ao <= 1.5)) throw ConfigError("ao_grid", "values must lie in (0, 1.5]");
    if (n_for_ao(ao, scenario.range, scenario.highway_length, scenario.slots_per_frame) < 1) {
      throw ConfigError("ao_grid", "AO " + format_ao(ao) + " yields no vehicles");
    }
  }
  // Duplicate sweep points would produce ambiguous rows.
  if (std::set<ProtocolKind>(protocols.begin(), protocols.end()).size() != protocols.size()) {
    throw ConfigError("protocols", "listed twice");
  }
  if (std::set<double>(ao_grid.begin(), ao_grid.end()).size() != ao_grid.size()) {
    throw ConfigError("ao_grid", "repeated value");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds", "repeated value");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
    }
    std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key.rfind("scenario.", 0) == 0) key = key.substr(9);
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key", line_no);
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    if (value.empty()) throw ConfigError(key, "missing value");

    if (key == "protocols" || key == "protocol") {
      cfg.protocols.clear();
      for (auto p : split(value, ',')) {
        try {
          cfg.protocols.push_back(parse_protocol_kind(p));
        } catch (const ParseError& e) {
          throw ConfigError(key, e.what());
        }
      }
    } else if (key == "ao_grid" || key == "ao") {
      cfg.ao_grid = parse_real_list(key, value);
    } else if (key == "seeds" || key == "seed") {
      cfg.seeds = parse_seed_list(key, value);
    } else if (key == "output") {
      cfg.output = std::string(value);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(to_int(key, value));
    } else if (key == "n_vehicles") {
      throw ConfigError(key, "derived from ao_grid; set the AO instead");
    } else if (!set_scenario_key(cfg.scenario, key, value)) {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ScenarioConfig scenario_for(const ScenarioConfig& base, double ao, std::uint64_t seed) {
  ScenarioConfig s = base;
  s.n_vehicles = n_for_ao(ao, base.range, base.highway_length, base.slots_per_frame);
  s.seed = seed;
  return s;
}

RunResult run_one(ProtocolKind kind, double ao, std::uint64_t seed, const ScenarioConfig& base,
                  const std::vector<TraceSink*>& extra) {
  const auto scenario = scenario_for(base, ao, seed);
  Simulator sim(SimulationSetup::random(kind, scenario));
  MetricsAccumulator acc(from_seconds(scenario.warmup));
  sim.add_sink(acc);
  for (auto* s : extra) sim.add_sink(*s);
  RunResult out;
  out.stats = sim.run();
  out.report = acc.report();
  out.report.protocol = std::string(to_string(kind));
  out.report.ao = ao;
  out.report.seed = seed;
  return out;
}

std::string format_ao(double ao) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", ao);
  return buf;
}

std::string trace_file_name(ProtocolKind kind, double ao, std::uint64_t seed) {
  return "trace_" + std::string(to_string(kind)) + "_ao" + format_ao(ao) + "_seed" + std::to_string(seed) + ".csv";
}

namespace {

bool row_less(const MetricsReport& a, const MetricsReport& b) {
  return std::tie(a.protocol, a.ao, a.seed) < std::tie(b.protocol, b.ao, b.seed);
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
  cfg.validate();
  struct Task {
    ProtocolKind kind;
    double ao;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (auto k : cfg.protocols) {
    for (double ao : cfg.ao_grid) {
      for (auto s : cfg.seeds) tasks.push_back({k, ao, s});
    }
  }
  // Heavy points first so the tail of the sweep is short.
  std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.ao > b.ao; });

  std::vector<std::optional<MetricsReport>> rows(tasks.size());
  std::vector<std::optional<std::string>> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;

  auto worker = [&] {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto& t = tasks[i];
      try {
        std::vector<TraceSink*> extra;
        std::ofstream trace_out;
        std::optional<ReceptionTraceWriter> writer;
        if (opts.trace_dir) {
          const auto path = *opts.trace_dir / trace_file_name(t.kind, t.ao, t.seed);
          trace_out.open(path);
          if (!trace_out) throw std::runtime_error("cannot write " + path.string());
          writer.emplace(trace_out);
          extra.push_back(&*writer);
        }
        rows[i] = run_one(t.kind, t.ao, t.seed, cfg.scenario, extra).report;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      const auto n = done.fetch_add(1) + 1;
      if (opts.progress) {
        std::lock_guard lock(progress_mu);
        opts.progress(n, tasks.size());
      }
    }
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SweepResult result;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (rows[i]) {
      result.rows.push_back(std::move(*rows[i]));
    } else {
      const auto& t = tasks[i];
      result.failures.push_back({std::string(to_string(t.kind)), t.ao, t.seed, errors[i].value_or("unknown error")});
    }
  }
  std::sort(result.rows.begin(), result.rows.end(), row_less);
  std::sort(result.failures.begin(), result.failures.end(), [](const RunFailure& a, const RunFailure& b) {
    return std::tie(a.protocol, a.ao, a.seed) < std::tie(b.protocol, b.ao, b.seed);
  });
  result.summary = summarize(result.rows);
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsReport>& rows) {
  std::map<std::pair<std::string, double>, std::vector<const MetricsReport*>> groups;
  for (const auto& r : rows) groups[{r.protocol, r.ao}].push_back(&r);

  struct Metric {
    const char* name;
    double MetricsReport::*field;
  };
  static constexpr Metric metrics[] = {
      {"merging_rate", &MetricsReport::merging_rate},
      {"access_rate", &MetricsReport::access_rate},
      {"loss_rate", &MetricsReport::loss_rate},
  };

  std::vector<SummaryRow> out;
  for (const auto& [key, members] : groups) {
    for (const auto& m : metrics) {
      const auto n = members.size();
      double sum = 0.0;
      for (const auto* r : members) sum += r->*m.field;
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (const auto* r : members) ss += (r->*m.field - mean) * (r->*m.field - mean);
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      out.push_back({key.first, key.second, m.name, mean, sd, n});
    }
  }
  return out;
}

void emit_csv(const SweepResult& result, std::ostream& os) {
  auto rows = result.rows;
  std::sort(rows.begin(), rows.end(), row_less);
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    os << r.protocol << ',' << format_ao(r.ao) << ',' << r.seed << ',' << fixed6(r.merging_rate) << ','
       << fixed6(r.access_rate) << ',' << fixed6(r.loss_rate) << ',' << r.sent << ',' << r.delivered << ','
       << r.collided << ',' << r.faded << ',' << r.dropped_overflow << '\n';
  }
}

void emit_summary(const SweepResult& result, std::ostream& os) {
  os << kSummaryHeader << '\n';
  for (const auto& s : result.summary) {
    os << s.protocol << ',' << format_ao(s.ao) << ',' << s.metric << ',' << fixed6(s.mean) << ',' << fixed6(s.stddev)
       << ',' << s.n_seeds << '\n';
  }
}

namespace {

template <class Emit>
void write_file(const SweepResult& result, const std::filesystem::path& path, Emit emit) {
  if (result.rows.empty()) throw std::runtime_error("nothing to write: the sweep produced no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit(result, out);
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  write_file(result, path, [](const SweepResult& r, std::ostream& os) { emit_csv(r, os); });
}

void emit_summary(const SweepResult& result, const std::filesystem::path& path) {
  write_file(result, path, [](const SweepResult& r, std::ostream& os) { emit_summary(r, os); });
}

std::vector<MetricsReport> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kResultsHeader) throw ParseError("missing or unexpected header", 1);
  std::vector<MetricsReport> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw ParseError("line " + std::to_string(line_no) + ": expected 11 fields", line_no);
    try {
      MetricsReport r;
      r.protocol = std::string(f[0]);
      r.ao = to_double("ao", f[1]);
      r.seed = to_u64("seed", f[2]);
      r.merging_rate = to_double("merging_rate", f[3]);
      r.access_rate = to_double("access_rate", f[4]);
      r.loss_rate = to_double("loss_rate", f[5]);
      r.sent = to_u64("sent", f[6]);
      r.delivered = to_u64("delivered", f[7]);
      r.collided = to_u64("collided", f[8]);
      r.faded = to_u64("faded", f[9]);
      r.dropped_overflow = to_u64("dropped_overflow", f[10]);
      out.push_back(std::move(r));
    } catch (const ConfigError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace vanetmac
