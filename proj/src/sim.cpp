#include "v2xledger/sim.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/core.h>

namespace v2xledger::sim {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::baseline:
      return "baseline";
    case RunMode::ledger:
      return "ledger";
    case RunMode::both:
      return "both";
  }
  return "?";
}

std::optional<RunMode> run_mode_from_string(std::string_view text) {
  if (text == "baseline") return RunMode::baseline;
  if (text == "ledger") return RunMode::ledger;
  if (text == "both") return RunMode::both;
  return std::nullopt;
}

std::optional<Mode> mode_from_string(std::string_view text) {
  if (text == "baseline") return Mode::baseline;
  if (text == "ledger") return Mode::ledger;
  return std::nullopt;
}

std::vector<Mode> modes_of(RunMode mode) {
  switch (mode) {
    case RunMode::baseline:
      return {Mode::baseline};
    case RunMode::ledger:
      return {Mode::ledger};
    case RunMode::both:
      return {Mode::baseline, Mode::ledger};
  }
  return {};
}

GridShape grid_shape(const SimConfig& c, const phy::McsTable& mcs) {
  if (c.numerology < 0 || c.numerology > 3) throw ConfigError("numerology", "numerology must be in [0, 3]");
  if (c.rri_ms <= 0) throw ConfigError("rri_ms", "rri_ms must be positive");
  const phy::Numerology& num = phy::numerology(c.numerology);
  GridShape shape;
  shape.subframes_per_rri = static_cast<std::size_t>(c.rri_ms) * static_cast<std::size_t>(num.slots_per_subframe);
  if (shape.subframes_per_rri > 0xffff) throw ConfigError("rri_ms", "too many subframes per RRI");

  if (c.subchannels_override > 0) {
    shape.subchannels_per_slot = c.subchannels_override;
  } else {
    if (!mcs.contains(c.mcs_index)) throw ConfigError("mcs_index", fmt::format("MCS index {} not in table", c.mcs_index));
    if (c.payload_bytes <= 0) throw ConfigError("payload_bytes", "payload_bytes must be positive");
    try {
      c.phy.validate();
      const auto prbs = phy::prbs_per_package(c.payload_bytes, mcs.at(c.mcs_index), c.phy);
      const auto width = phy::subchannel_prbs(prbs, c.phy.subchannel_mode);
      shape.subchannels_per_slot = static_cast<std::size_t>(phy::subchannels_per_slot(num, width));
    } catch (const phy::DimensioningError& e) {
      throw ConfigError("payload_bytes", e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("phy", e.what());
    }
  }
  if (shape.subchannels_per_slot > 256) {
    throw ConfigError("subchannels_per_slot", "sub-channel ids must fit one byte (<= 256 sub-channels)");
  }
  return shape;
}

void validate(const SimConfig& c, const phy::McsTable& mcs) {
  if (c.num_vehicles == 0) throw ConfigError("num_vehicles", "num_vehicles must be at least 1");
  if (c.num_vehicles > 256) throw ConfigError("num_vehicles", "vehicle ids are one byte: at most 256 vehicles");
  if (c.num_rris < sps::kMaxReselectionCounter) {
    throw ConfigError("num_rris", fmt::format("num_rris must be >= {}", sps::kMaxReselectionCounter));
  }
  if (c.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (!(c.keep_probability >= 0.0 && c.keep_probability <= 1.0)) {
    throw ConfigError("keep_probability", "keep_probability must lie in [0, 1]");
  }
  if (c.ledger_retention_rris < 1) throw ConfigError("ledger_retention_rris", "ledger_retention_rris must be >= 1");
  const GridShape shape = grid_shape(c, mcs);
  if (c.num_vehicles > shape.resources() && !c.allow_overload) {
    throw CapacityError(fmt::format("{} vehicles exceed the {} resources of one RRI ({} x {}); set allow_overload",
                                    c.num_vehicles, shape.resources(), shape.subframes_per_rri,
                                    shape.subchannels_per_slot));
  }
}

std::optional<std::size_t> convergence_rri(std::span<const double> trace) {
  std::size_t k = trace.size();
  while (k > 0 && trace[k - 1] == 0.0) --k;
  if (k == trace.size() && !trace.empty()) return std::nullopt;
  return k;
}

RunResult run(const SimConfig& config, std::uint64_t seed, Mode mode, const RunOptions& options,
              const phy::McsTable& mcs) {
  validate(config, mcs);
  const GridShape shape = grid_shape(config, mcs);

  sps::WorldConfig wc;
  wc.num_vehicles = config.num_vehicles;
  wc.mu = config.numerology;
  wc.rri_ms = config.rri_ms;
  wc.subchannels_per_slot = shape.subchannels_per_slot;
  wc.mode = mode;
  wc.keep_probability = config.keep_probability;
  wc.seed = seed;
  wc.ledger_retention_rris = config.ledger_retention_rris;
  wc.record_transmissions = options.keep_transmissions;
  sps::World world(wc);

  RunResult result;
  result.seed = seed;
  result.mode = mode;
  result.num_vehicles = config.num_vehicles;
  const auto rris = static_cast<std::size_t>(config.num_rris);
  result.collision_probability.reserve(rris);
  result.transmissions.reserve(rris);
  result.colliding_transmissions.reserve(rris);

  for (std::int64_t rri = 0; rri < config.num_rris; ++rri) {
    std::size_t sent = 0;
    std::size_t collided = 0;
    for (std::size_t sf = 0; sf < shape.subframes_per_rri; ++sf) {
      auto out = world.advance_subframe(rri, static_cast<std::uint16_t>(sf));
      sent += out.transmissions;
      collided += out.colliding_transmissions;
      if (options.keep_events) {
        std::move(out.collisions.begin(), out.collisions.end(), std::back_inserter(result.events));
      }
    }
    result.transmissions.push_back(sent);
    result.colliding_transmissions.push_back(collided);
    result.collision_probability.push_back(sent == 0 ? 0.0 : static_cast<double>(collided) / static_cast<double>(sent));
  }
  result.convergence_rri = convergence_rri(result.collision_probability);
  if (options.keep_events) result.awareness = world.awareness_log();
  if (options.keep_transmissions) result.transmission_log = world.transmission_log();
  return result;
}

MetricsTrace run_ensemble(const SimConfig& config, Mode mode, const RunOptions& options, unsigned threads,
                          const phy::McsTable& mcs) {
  validate(config, mcs);
  MetricsTrace trace;
  trace.mode = mode;
  trace.per_seed.resize(config.seeds.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.seeds.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(config.seeds.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      try {
        trace.per_seed[i] = run(config, config.seeds[i], mode, options, mcs);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const auto rris = static_cast<std::size_t>(config.num_rris);
  trace.mean.assign(rris, 0.0);
  trace.min.assign(rris, 1.0);
  trace.max.assign(rris, 0.0);
  for (const RunResult& r : trace.per_seed) {
    for (std::size_t k = 0; k < rris; ++k) {
      const double p = r.collision_probability[k];
      trace.mean[k] += p;
      trace.min[k] = std::min(trace.min[k], p);
      trace.max[k] = std::max(trace.max[k], p);
    }
    trace.per_seed_convergence_rri.push_back(r.convergence_rri);
  }
  for (double& m : trace.mean) m /= static_cast<double>(trace.per_seed.size());
  return trace;
}

PairedTraces run_paired(const SimConfig& config, const RunOptions& options, unsigned threads,
                        const phy::McsTable& mcs) {
  return PairedTraces{run_ensemble(config, Mode::baseline, options, threads, mcs),
                      run_ensemble(config, Mode::ledger, options, threads, mcs)};
}

}  // namespace v2xledger::sim
