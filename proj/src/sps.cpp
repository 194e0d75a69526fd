#include "v2xledger/sps.hpp"

#include <fmt/core.h>

namespace v2xledger::sps {

std::string_view to_string(Mode mode) { return mode == Mode::baseline ? "baseline" : "ledger"; }

ResourceGrid::ResourceGrid(std::size_t subframes_per_rri, std::size_t subchannels_per_slot)
    : subframes_(subframes_per_rri),
      subchannels_(subchannels_per_slot),
      occupancy_(subframes_per_rri * subchannels_per_slot),
      placed_(256, false) {
  if (subframes_ == 0 || subchannels_ == 0) throw std::invalid_argument("empty resource grid");
  if (subframes_ > 0xffff) throw std::invalid_argument("too many subframes per RRI");
}

std::size_t ResourceGrid::index(Resource at) const {
  if (at.subframe_index >= subframes_ || at.subchannel_id >= subchannels_) {
    throw std::out_of_range(fmt::format("resource ({}, {}) outside {}x{} grid", at.subframe_index, at.subchannel_id,
                                        subframes_, subchannels_));
  }
  return std::size_t{at.subframe_index} * subchannels_ + at.subchannel_id;
}

void ResourceGrid::place(VehicleId vehicle, Resource at) {
  const std::size_t i = index(at);
  if (placed_[vehicle]) throw std::logic_error(fmt::format("vehicle {} transmits twice in one RRI", vehicle));
  placed_[vehicle] = true;
  occupancy_[i].push_back(vehicle);
}

const std::vector<VehicleId>& ResourceGrid::transmitters(Resource at) const { return occupancy_[index(at)]; }

void ResourceGrid::clear() {
  for (auto& cell : occupancy_) cell.clear();
  placed_.assign(placed_.size(), false);
}

SensingList sense(const ResourceGrid& grid, std::uint16_t subframe_index, Micros timestamp) {
  if (subframe_index >= grid.subframes_per_rri()) throw std::out_of_range("sensed subframe outside the RRI");
  SensingList out{subframe_index, timestamp, std::vector<bool>(grid.subchannels_per_slot(), false)};
  for (std::size_t s = 0; s < grid.subchannels_per_slot(); ++s) {
    out.busy[s] = !grid.transmitters(Resource{subframe_index, static_cast<SubchannelId>(s)}).empty();
  }
  return out;
}

void BusyMap::set_row(std::uint16_t subframe_index, const std::vector<bool>& row) {
  for (std::size_t s = 0; s < subchannels_ && s < row.size(); ++s) {
    busy_[subframe_index * subchannels_ + s] = row[s];
  }
}

void BusyMap::fill_row(std::uint16_t subframe_index, bool value) {
  for (std::size_t s = 0; s < subchannels_; ++s) busy_[subframe_index * subchannels_ + s] = value;
}

Resource select_resource(const BusyMap& view, Rng& rng) {
  std::size_t idle = 0;
  for (std::size_t i = 0; i < view.size(); ++i) idle += !view.busy(view.resource_at(i));
  if (idle == 0) return view.resource_at(rng.below(view.size()));
  auto pick = rng.below(idle);
  for (std::size_t i = 0; i < view.size(); ++i) {
    const Resource r = view.resource_at(i);
    if (view.busy(r)) continue;
    if (pick == 0) return r;
    --pick;
  }
  throw std::logic_error("idle resource count changed during selection");
}

int draw_rc(Rng& rng) { return static_cast<int>(rng.between(kMinReselectionCounter, kMaxReselectionCounter)); }

VehicleStreams VehicleStreams::for_vehicle(std::uint64_t seed, VehicleId id) {
  return VehicleStreams{Rng::stream(seed, id, StreamPurpose::selection),
                        Rng::stream(seed, id, StreamPurpose::reselection_counter),
                        Rng::stream(seed, id, StreamPurpose::keep_decision)};
}

Decision end_of_period(VehicleState& v, VehicleStreams& streams) {
  if (v.rc != 0) throw ContractViolation(fmt::format("end_of_period with rc={} for vehicle {}", v.rc, v.vehicle_id));
  Decision d;
  if (v.mode == Mode::ledger) {
    d = v.collided_this_period ? Decision::reselect : Decision::keep;
  } else {
    d = streams.keep_decision.unit() < v.keep_probability ? Decision::keep : Decision::reselect;
  }
  v.rc = draw_rc(streams.reselection_counter);
  v.collided_this_period = false;
  return d;
}

}  // namespace v2xledger::sps
