// Trace and event-log files, and the replay check that recomputes a trace
// from an event log by counting occupancy.
//
// Trace CSV:
//   rri_index,mode,mean_collision_prob,min_prob,max_prob,n_seeds
// one row per (mode, rri_index), modes in baseline-then-ledger order,
// rri_index starting at 1, probabilities with 9 decimals.
//
// Event log:
//   t_us,rri,subframe,subchannel,colliders
//   # run mode=<m> seed=<s> vehicles=<n> rris=<k>
//   <t_us>,<rri>,<subframe>,<subchannel>,<id>;<id>[;...]
// One `# run` header per (mode, seed); `rri` is 1-based like the trace.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "v2xledger/sim.hpp"

namespace v2xledger::trace_io {

struct TraceRow {
  std::int64_t rri_index = 0;
  sps::Mode mode = sps::Mode::ledger;
  double mean = 0;
  double min = 0;
  double max = 0;
  std::size_t n_seeds = 0;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<TraceRow> rows_of(const std::vector<sim::MetricsTrace>& traces);

void write_trace_csv(std::ostream& out, const std::vector<sim::MetricsTrace>& traces);
void write_trace_json(std::ostream& out, const std::vector<sim::MetricsTrace>& traces);

/// Throws FormatError.
std::vector<TraceRow> read_trace_csv(std::istream& in);

void write_event_log(std::ostream& out, const std::vector<sim::MetricsTrace>& traces);

struct LoggedRun {
  sps::Mode mode = sps::Mode::ledger;
  std::uint64_t seed = 0;
  std::size_t vehicles = 0;
  std::int64_t rris = 0;
  std::vector<sps::CollisionEvent> events;  // rri_index 0-based
};

/// Throws FormatError.
std::vector<LoggedRun> read_event_log(std::istream& in);

/// Gnuplot script plotting mean collision probability per mode from a trace
/// CSV.
std::string plot_script(const std::string& csv_path);

struct ReplayVerdict {
  bool consistent = true;
  std::optional<std::int64_t> rri_index;  // first divergent row, 1-based
  std::optional<sps::Mode> mode;
  std::string message;
};

/// Recomputes every trace row from the event log (each vehicle transmits
/// once per RRI, so colliding transmissions / vehicles per run) and reports
/// the first row that differs by more than `tolerance`.
ReplayVerdict replay(const std::vector<LoggedRun>& log, const std::vector<TraceRow>& trace, double tolerance = 1e-8);

}  // namespace v2xledger::trace_io
