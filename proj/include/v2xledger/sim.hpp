// Monte Carlo driver: scenario configuration, single-seed runs, seed
// ensembles and paired baseline/ledger runs on common random numbers.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "v2xledger/phy_capacity.hpp"
#include "v2xledger/world.hpp"

namespace v2xledger::sim {

using sps::Mode;

enum class RunMode { baseline, ledger, both };

std::string_view to_string(RunMode mode);
std::optional<RunMode> run_mode_from_string(std::string_view text);
std::optional<Mode> mode_from_string(std::string_view text);

/// Invalid field values. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// More vehicles than the grid has resources, without allow_overload.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  std::size_t num_vehicles = 100;
  std::int64_t rri_ms = 100;
  int numerology = 0;
  std::int64_t payload_bytes = 350;
  int mcs_index = 1;
  std::int64_t num_rris = 100;
  std::vector<std::uint64_t> seeds{1};
  RunMode mode = RunMode::ledger;
  double keep_probability = 0.8;
  bool allow_overload = false;
  /// 0 derives the sub-channel count from the PHY dimensioning.
  std::size_t subchannels_override = 0;
  int ledger_retention_rris = 2;
  phy::PhyConfig phy;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct GridShape {
  std::size_t subframes_per_rri = 0;
  std::size_t subchannels_per_slot = 0;
  std::size_t resources() const { return subframes_per_rri * subchannels_per_slot; }
};

/// Grid implied by the configuration. Throws ConfigError.
GridShape grid_shape(const SimConfig& config, const phy::McsTable& mcs = phy::McsTable::builtin());

/// Throws ConfigError for invalid fields, CapacityError for an overloaded
/// grid without allow_overload.
void validate(const SimConfig& config, const phy::McsTable& mcs = phy::McsTable::builtin());

struct RunOptions {
  bool keep_events = true;
  bool keep_transmissions = false;
};

/// One seed, one mode.
struct RunResult {
  std::uint64_t seed = 0;
  Mode mode = Mode::ledger;
  std::size_t num_vehicles = 0;
  /// Colliding transmissions / transmissions, per RRI.
  std::vector<double> collision_probability;
  std::vector<std::size_t> transmissions;
  std::vector<std::size_t> colliding_transmissions;
  std::optional<std::size_t> convergence_rri;
  std::vector<sps::CollisionEvent> events;
  std::vector<sps::AwarenessEvent> awareness;
  std::vector<sps::TransmissionRecord> transmission_log;
};

/// Seed-averaged trace for one mode plus the per-seed runs behind it.
struct MetricsTrace {
  Mode mode = Mode::ledger;
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<std::optional<std::size_t>> per_seed_convergence_rri;
  std::vector<RunResult> per_seed;

  std::size_t n_seeds() const { return per_seed.size(); }
};

/// Smallest index k with trace[j] == 0 for every j >= k; empty when the
/// last entry is non-zero.
std::optional<std::size_t> convergence_rri(std::span<const double> trace);

RunResult run(const SimConfig& config, std::uint64_t seed, Mode mode, const RunOptions& options = {},
              const phy::McsTable& mcs = phy::McsTable::builtin());

/// Runs every seed of `config` in `mode`. Seeds are independent and may run
/// on up to `threads` workers (0 = hardware concurrency); the result does
/// not depend on the thread count.
MetricsTrace run_ensemble(const SimConfig& config, Mode mode, const RunOptions& options = {}, unsigned threads = 0,
                          const phy::McsTable& mcs = phy::McsTable::builtin());

struct PairedTraces {
  MetricsTrace baseline;
  MetricsTrace ledger;
};

/// Baseline and ledger over the same seeds and grid. Per-vehicle random
/// streams are keyed by (seed, vehicle id, purpose), so both modes draw the
/// same initial resources and re-selection counters.
PairedTraces run_paired(const SimConfig& config, const RunOptions& options = {}, unsigned threads = 0,
                        const phy::McsTable& mcs = phy::McsTable::builtin());

/// Modes requested by the config, baseline first.
std::vector<Mode> modes_of(RunMode mode);

}  // namespace v2xledger::sim
