// v2xledger command-line front end.
//
//   v2xledger capacity --mu 0 --payload 350 --mcs 1 --rri 100
//   v2xledger simulate --config scenario.txt --mode both --out trace.csv
//   v2xledger replay --events events.log --trace trace.csv

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "v2xledger/phy_capacity.hpp"
#include "v2xledger/scenario.hpp"
#include "v2xledger/sim.hpp"
#include "v2xledger/trace_io.hpp"

namespace {

using namespace v2xledger;

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;

struct CapacityArgs {
  int mu = 0;
  std::int64_t payload = 350;
  int mcs = 1;
  std::int64_t rri = 100;
  std::int64_t baseline_payload = 300;
  std::string mcs_table;
  std::string subchannel_mode = "exact";
};

struct SimulateArgs {
  std::string config;
  std::string mode;
  std::string seeds;
  std::string out;
  std::string format = "csv";
  std::string log_events;
  std::string plot_script;
  std::string effective_config;
  bool allow_overload = false;
  unsigned threads = 1;
};

struct ReplayArgs {
  std::string events;
  std::string trace;
  double tolerance = 1e-8;
};

std::string opt(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string("n/a"); }

int cmd_capacity(const CapacityArgs& a) {
  try {
    const phy::Numerology& num = phy::numerology(a.mu);
    const phy::McsTable table = a.mcs_table.empty() ? phy::McsTable::builtin() : phy::McsTable::load(a.mcs_table);
    if (!table.contains(a.mcs)) throw std::invalid_argument(fmt::format("MCS index {} not in table", a.mcs));
    const phy::McsEntry& mcs = table.at(a.mcs);
    const auto mode = phy::subchannel_mode_from_string(a.subchannel_mode);
    if (!mode) throw std::invalid_argument(fmt::format("unknown sub-channel mode '{}'", a.subchannel_mode));
    if (a.payload < 0 || a.baseline_payload < 0) throw std::invalid_argument("payload must be non-negative");
    if (a.rri <= 0) throw std::invalid_argument("rri must be positive");
    phy::PhyConfig cfg;
    cfg.subchannel_mode = *mode;

    const auto report = phy::capacity_report(a.payload, mcs, cfg, num, a.rri);
    const auto base = phy::capacity_report(a.baseline_payload, mcs, cfg, num, a.rri);
    fmt::print("numerology            mu={} scs={}kHz slots/subframe={}\n", num.mu, num.scs_khz, num.slots_per_subframe);
    fmt::print("mcs                   index={} order={} eta={}\n", mcs.index, mcs.modulation_order,
               mcs.spectral_efficiency.to_string());
    fmt::print("payload_bytes         {}\n", a.payload);
    fmt::print("re_per_prb            {}\n", report.re_per_prb);
    fmt::print("res_per_package       {}\n", report.res_per_package);
    fmt::print("prbs_per_package      {}\n", report.prbs_per_package);
    fmt::print("prbs_per_slot         {}\n", report.prbs_per_slot);
    fmt::print("subchannel_prbs       {}\n", opt(report.subchannel_prbs));
    fmt::print("subchannels_per_slot  {}\n", opt(report.subchannels_per_slot));
    fmt::print("max_vehicles          {}\n", opt(report.max_vehicles));
    fmt::print("baseline_payload      {}\n", a.baseline_payload);
    fmt::print("baseline_max_vehicles {}\n", opt(base.max_vehicles));
    if (report.max_vehicles && base.max_vehicles) {
      fmt::print("overhead              {:.6f}\n", phy::overhead_fraction(*report.max_vehicles, *base.max_vehicles));
    } else {
      fmt::print("overhead              n/a\n");
    }
    return 0;
  } catch (const std::exception& e) {
    fmt::print(stderr, "capacity: {}\n", e.what());
    return kExitUsage;
  }
}

/// Writes `content` to `path` in one go. Returns false on any I/O failure.
bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  out.flush();
  return static_cast<bool>(out);
}

int cmd_simulate(const SimulateArgs& a) {
  sim::SimConfig config;
  try {
    config = scenario::load(a.config);
    if (!a.mode.empty()) {
      const auto m = sim::run_mode_from_string(a.mode);
      if (!m) throw sim::ConfigError("mode", fmt::format("mode: '{}' is not baseline|ledger|both", a.mode));
      config.mode = *m;
    }
    if (!a.seeds.empty()) {
      try {
        config.seeds = scenario::parse_seed_list(a.seeds);
      } catch (const std::invalid_argument& e) {
        throw sim::ConfigError("seeds", fmt::format("seeds: {}", e.what()));
      }
    }
    if (a.allow_overload) config.allow_overload = true;
    sim::validate(config);
  } catch (const sim::CapacityError& e) {
    fmt::print(stderr, "simulate: {}\n", e.what());
    return kExitCapacity;
  } catch (const std::exception& e) {
    fmt::print(stderr, "simulate: {}\n", e.what());
    return kExitConfig;
  }

  std::vector<sim::MetricsTrace> traces;
  sim::RunOptions options;
  options.keep_events = !a.log_events.empty();
  for (sim::Mode mode : sim::modes_of(config.mode)) {
    traces.push_back(sim::run_ensemble(config, mode, options, a.threads));
  }

  // all outputs are rendered first and written sequentially afterwards
  std::ostringstream trace_text;
  if (a.format == "json") {
    trace_io::write_trace_json(trace_text, traces);
  } else {
    trace_io::write_trace_csv(trace_text, traces);
  }
  if (a.out.empty()) {
    std::cout << trace_text.str();
  } else if (!write_file(a.out, trace_text.str())) {
    fmt::print(stderr, "simulate: cannot write '{}'\n", a.out);
    return kExitIo;
  }
  if (!a.log_events.empty()) {
    std::ostringstream log_text;
    trace_io::write_event_log(log_text, traces);
    if (!write_file(a.log_events, log_text.str())) {
      fmt::print(stderr, "simulate: cannot write '{}'\n", a.log_events);
      return kExitIo;
    }
  }
  if (!a.plot_script.empty()) {
    const std::string source = a.out.empty() || a.format != "csv" ? std::string("trace.csv") : a.out;
    if (!write_file(a.plot_script, trace_io::plot_script(source))) {
      fmt::print(stderr, "simulate: cannot write '{}'\n", a.plot_script);
      return kExitIo;
    }
  }
  if (!a.effective_config.empty() && !write_file(a.effective_config, scenario::write(config))) {
    fmt::print(stderr, "simulate: cannot write '{}'\n", a.effective_config);
    return kExitIo;
  }
  return 0;
}

int cmd_replay(const ReplayArgs& a) {
  std::ifstream events(a.events);
  if (!events) {
    fmt::print(stderr, "replay: cannot read '{}'\n", a.events);
    return kExitIo;
  }
  std::ifstream trace(a.trace);
  if (!trace) {
    fmt::print(stderr, "replay: cannot read '{}'\n", a.trace);
    return kExitIo;
  }
  try {
    const auto log = trace_io::read_event_log(events);
    const auto rows = trace_io::read_trace_csv(trace);
    const auto verdict = trace_io::replay(log, rows, a.tolerance);
    fmt::print("{}\n", verdict.message);
    return verdict.consistent ? 0 : 1;
  } catch (const trace_io::FormatError& e) {
    fmt::print(stderr, "replay: malformed input: {}\n", e.what());
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR-V2X SPS / ledger-augmented SPS simulator and capacity calculator"};
  app.require_subcommand(1);

  CapacityArgs cap;
  auto* capacity = app.add_subcommand("capacity", "Sidelink capacity report for one payload size");
  capacity->add_option("--mu", cap.mu, "Numerology (0-3)");
  capacity->add_option("--payload", cap.payload, "Package size in bytes");
  capacity->add_option("--mcs", cap.mcs, "MCS index");
  capacity->add_option("--rri", cap.rri, "Resource reservation interval in ms");
  capacity->add_option("--baseline-payload", cap.baseline_payload, "Payload the overhead is measured against");
  capacity->add_option("--mcs-table", cap.mcs_table, "MCS table file (index order eta per line)");
  capacity->add_option("--subchannel-mode", cap.subchannel_mode, "exact or standard");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a scenario file");
  simulate->add_option("--config", simulate_args.config, "Scenario file")->required();
  simulate->add_option("--mode", simulate_args.mode, "baseline, ledger or both (overrides the file)");
  simulate->add_option("--seeds", simulate_args.seeds, "Seed list, e.g. 1-30 (overrides the file)");
  simulate->add_option("--out", simulate_args.out, "Trace output path (stdout if omitted)");
  simulate->add_option("--format", simulate_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--log-events", simulate_args.log_events, "Write the collision event log here");
  simulate->add_option("--plot-script", simulate_args.plot_script, "Write a gnuplot script for the trace here");
  simulate->add_option("--effective-config", simulate_args.effective_config,
                       "Write the resolved scenario (all keys) here");
  simulate->add_flag("--allow-overload", simulate_args.allow_overload, "Permit more vehicles than resources");
  simulate->add_option("--threads", simulate_args.threads, "Worker threads for seeds (0 = all cores)");

  ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "Recompute a trace from its event log and compare");
  replay->add_option("--events", replay_args.events, "Event log from simulate --log-events")->required();
  replay->add_option("--trace", replay_args.trace, "Trace CSV to check")->required();
  replay->add_option("--tolerance", replay_args.tolerance, "Absolute tolerance per probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // a missing --config is an unreadable config, not a usage slip
    const int code = app.exit(e);
    if (simulate->parsed() && simulate_args.config.empty()) return kExitConfig;
    return code == 0 ? 0 : kExitUsage;
  }

  if (capacity->parsed()) return cmd_capacity(cap);
  if (simulate->parsed()) return cmd_simulate(simulate_args);
  return cmd_replay(replay_args);
}
