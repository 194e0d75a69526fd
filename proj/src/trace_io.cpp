#include "v2xledger/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "json.hpp"

namespace v2xledger::trace_io {

namespace {

constexpr std::string_view kTraceHeader = "rri_index,mode,mean_collision_prob,min_prob,max_prob,n_seeds";
constexpr std::string_view kLogHeader = "t_us,rri,subframe,subchannel,colliders";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
T to_int(std::string_view s, int line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError(fmt::format("line {}: '{}' is not an integer", line_no, s));
  }
  return v;
}

double to_double(std::string_view s, int line_no) {
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw FormatError(fmt::format("line {}: '{}' is not a number", line_no, s));
  }
  return v;
}

sps::Mode to_mode(std::string_view s, int line_no) {
  const auto m = sim::mode_from_string(s);
  if (!m) throw FormatError(fmt::format("line {}: unknown mode '{}'", line_no, s));
  return *m;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<TraceRow> rows_of(const std::vector<sim::MetricsTrace>& traces) {
  std::vector<const sim::MetricsTrace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->mode == sps::Mode::baseline && b->mode != a->mode; });
  std::vector<TraceRow> rows;
  for (const auto* t : ordered) {
    for (std::size_t k = 0; k < t->mean.size(); ++k) {
      rows.push_back(TraceRow{static_cast<std::int64_t>(k) + 1, t->mode, t->mean[k], t->min[k], t->max[k], t->n_seeds()});
    }
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<sim::MetricsTrace>& traces) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows_of(traces)) {
    fmt::print(out, "{},{},{:.9f},{:.9f},{:.9f},{}\n", r.rri_index, sps::to_string(r.mode), r.mean, r.min, r.max,
               r.n_seeds);
  }
}

void write_trace_json(std::ostream& out, const std::vector<sim::MetricsTrace>& traces) {
  nlohmann::json rows = nlohmann::json::array();
  for (const TraceRow& r : rows_of(traces)) {
    rows.push_back({{"rri_index", r.rri_index},
                    {"mode", std::string(sps::to_string(r.mode))},
                    {"mean_collision_prob", r.mean},
                    {"min_prob", r.min},
                    {"max_prob", r.max},
                    {"n_seeds", r.n_seeds}});
  }
  out << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::vector<TraceRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kTraceHeader) throw FormatError(fmt::format("line 1: expected header '{}'", kTraceHeader));
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw FormatError(fmt::format("line {}: expected 6 fields", line_no));
    rows.push_back(TraceRow{to_int<std::int64_t>(f[0], line_no), to_mode(f[1], line_no), to_double(f[2], line_no),
                            to_double(f[3], line_no), to_double(f[4], line_no), to_int<std::size_t>(f[5], line_no)});
  }
  if (line_no == 0) throw FormatError("empty trace file");
  return rows;
}

void write_event_log(std::ostream& out, const std::vector<sim::MetricsTrace>& traces) {
  out << kLogHeader << '\n';
  std::vector<const sim::MetricsTrace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->mode == sps::Mode::baseline && b->mode != a->mode; });
  for (const auto* t : ordered) {
    for (const sim::RunResult& r : t->per_seed) {
      fmt::print(out, "# run mode={} seed={} vehicles={} rris={}\n", sps::to_string(r.mode), r.seed, r.num_vehicles,
                 r.collision_probability.size());
      for (const auto& ev : r.events) {
        std::string who;
        for (auto id : ev.colliders) {
          if (!who.empty()) who += ';';
          who += std::to_string(id);
        }
        fmt::print(out, "{},{},{},{},{}\n", ev.t_trans, ev.rri_index + 1, ev.subframe_index, ev.subchannel_id, who);
      }
    }
  }
}

std::vector<LoggedRun> read_event_log(std::istream& in) {
  std::vector<LoggedRun> runs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1 && line == kLogHeader) continue;
    if (line.starts_with("# run ")) {
      LoggedRun run;
      bool have_mode = false, have_seed = false, have_vehicles = false, have_rris = false;
      for (std::string_view field : split(std::string_view(line).substr(6), ' ')) {
        if (field.empty()) continue;
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw FormatError(fmt::format("line {}: bad run header", line_no));
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "mode") {
          run.mode = to_mode(value, line_no);
          have_mode = true;
        } else if (key == "seed") {
          run.seed = to_int<std::uint64_t>(value, line_no);
          have_seed = true;
        } else if (key == "vehicles") {
          run.vehicles = to_int<std::size_t>(value, line_no);
          have_vehicles = true;
        } else if (key == "rris") {
          run.rris = to_int<std::int64_t>(value, line_no);
          have_rris = true;
        } else {
          throw FormatError(fmt::format("line {}: unknown run header field '{}'", line_no, key));
        }
      }
      if (!(have_mode && have_seed && have_vehicles && have_rris) || run.vehicles == 0) {
        throw FormatError(fmt::format("line {}: incomplete run header", line_no));
      }
      runs.push_back(std::move(run));
      continue;
    }
    if (runs.empty()) throw FormatError(fmt::format("line {}: event before any run header", line_no));
    const auto f = split(line, ',');
    if (f.size() != 5) throw FormatError(fmt::format("line {}: expected 5 fields", line_no));
    sps::CollisionEvent ev;
    ev.t_trans = to_int<std::int64_t>(f[0], line_no);
    ev.rri_index = to_int<std::int64_t>(f[1], line_no) - 1;
    ev.subframe_index = to_int<std::uint16_t>(f[2], line_no);
    ev.subchannel_id = to_int<std::uint16_t>(f[3], line_no);
    for (std::string_view id : split(f[4], ';')) ev.colliders.push_back(to_int<std::uint8_t>(id, line_no));
    if (ev.colliders.size() < 2) throw FormatError(fmt::format("line {}: a collision needs two vehicles", line_no));
    if (ev.rri_index < 0 || ev.rri_index >= runs.back().rris) {
      throw FormatError(fmt::format("line {}: rri outside the run", line_no));
    }
    runs.back().events.push_back(std::move(ev));
  }
  return runs;
}

std::string plot_script(const std::string& csv_path) {
  return fmt::format(
      "# gnuplot script: mean collision probability per RRI\n"
      "set datafile separator ','\n"
      "set key top right\n"
      "set xlabel 'RRI index'\n"
      "set ylabel 'collision probability'\n"
      "set yrange [0:*]\n"
      "plot '{0}' using 1:(stringcolumn(2) eq 'baseline' ? $3 : 1/0) every ::1 with lines title 'baseline', \\\n"
      "     '{0}' using 1:(stringcolumn(2) eq 'ledger' ? $3 : 1/0) every ::1 with lines title 'ledger'\n",
      csv_path);
}

ReplayVerdict replay(const std::vector<LoggedRun>& log, const std::vector<TraceRow>& trace, double tolerance) {
  // per mode: per-run per-RRI colliding transmission counts
  struct Recomputed {
    std::vector<std::vector<double>> per_run;
  };
  std::map<sps::Mode, Recomputed> by_mode;
  for (const LoggedRun& run : log) {
    std::vector<double> colliding(static_cast<std::size_t>(run.rris), 0.0);
    for (const auto& ev : run.events) colliding[static_cast<std::size_t>(ev.rri_index)] += static_cast<double>(ev.colliders.size());
    for (double& c : colliding) c /= static_cast<double>(run.vehicles);
    by_mode[run.mode].per_run.push_back(std::move(colliding));
  }

  for (const TraceRow& row : trace) {
    double mean = 0.0, lo = 0.0, hi = 0.0;
    const auto it = by_mode.find(row.mode);
    if (it != by_mode.end()) {
      const auto& runs = it->second.per_run;
      if (runs.size() != row.n_seeds) {
        return ReplayVerdict{false, row.rri_index, row.mode,
                             fmt::format("log has {} {} runs, trace reports {} seeds", runs.size(),
                                         sps::to_string(row.mode), row.n_seeds)};
      }
      const auto k = static_cast<std::size_t>(row.rri_index - 1);
      lo = 1.0;
      for (const auto& r : runs) {
        if (row.rri_index < 1 || k >= r.size()) {
          return ReplayVerdict{false, row.rri_index, row.mode, "trace row outside the logged runs"};
        }
        mean += r[k];
        lo = std::min(lo, r[k]);
        hi = std::max(hi, r[k]);
      }
      mean /= static_cast<double>(runs.size());
    }
    const double worst = std::max({std::abs(mean - row.mean), std::abs(lo - row.min), std::abs(hi - row.max)});
    if (worst > tolerance) {
      return ReplayVerdict{false, row.rri_index, row.mode,
                           fmt::format("divergence at rri {} ({}): trace mean {:.9f}, recomputed {:.9f}", row.rri_index,
                                       sps::to_string(row.mode), row.mean, mean)};
    }
  }
  return ReplayVerdict{true, std::nullopt, std::nullopt, "consistent"};
}

}  // namespace v2xledger::trace_io
