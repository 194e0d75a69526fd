// Semi-persistent scheduling primitives: the periodic resource pool, boolean
// sensing, resource selection, the re-selection counter and the two
// end-of-period policies.
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "v2xledger/local_ledger.hpp"
#include "v2xledger/rng.hpp"

namespace v2xledger::sps {

using ledger::Micros;
using ledger::SensingList;
using ledger::SubchannelId;
using ledger::VehicleId;

enum class Mode { baseline, ledger };

std::string_view to_string(Mode mode);

inline constexpr int kMinReselectionCounter = 5;
inline constexpr int kMaxReselectionCounter = 15;

struct Resource {
  std::uint16_t subframe_index = 0;
  SubchannelId subchannel_id = 0;

  friend auto operator<=>(const Resource&, const Resource&) = default;
};

/// Who transmits where during one RRI.
class ResourceGrid {
 public:
  ResourceGrid(std::size_t subframes_per_rri, std::size_t subchannels_per_slot);

  std::size_t subframes_per_rri() const { return subframes_; }
  std::size_t subchannels_per_slot() const { return subchannels_; }
  std::size_t size() const { return subframes_ * subchannels_; }

  /// Throws std::logic_error if `vehicle` already transmits in this RRI.
  void place(VehicleId vehicle, Resource at);
  const std::vector<VehicleId>& transmitters(Resource at) const;
  void clear();

 private:
  std::size_t index(Resource at) const;

  std::size_t subframes_;
  std::size_t subchannels_;
  std::vector<std::vector<VehicleId>> occupancy_;
  std::vector<bool> placed_;  // by vehicle id
};

/// Perfect boolean sensing: busy wherever at least one vehicle transmits,
/// collisions included.
SensingList sense(const ResourceGrid& grid, std::uint16_t subframe_index, Micros timestamp);

/// A vehicle's busy/idle picture of every resource of one RRI.
class BusyMap {
 public:
  BusyMap(std::size_t subframes_per_rri, std::size_t subchannels_per_slot)
      : subframes_(subframes_per_rri), subchannels_(subchannels_per_slot), busy_(subframes_per_rri * subchannels_per_slot) {}

  std::size_t subframes_per_rri() const { return subframes_; }
  std::size_t subchannels_per_slot() const { return subchannels_; }
  std::size_t size() const { return busy_.size(); }

  bool busy(Resource at) const { return busy_[at.subframe_index * subchannels_ + at.subchannel_id]; }
  void set(Resource at, bool value) { busy_[at.subframe_index * subchannels_ + at.subchannel_id] = value; }
  void set_row(std::uint16_t subframe_index, const std::vector<bool>& row);
  void fill_row(std::uint16_t subframe_index, bool value);

  Resource resource_at(std::size_t flat) const {
    return Resource{static_cast<std::uint16_t>(flat / subchannels_), static_cast<SubchannelId>(flat % subchannels_)};
  }

 private:
  std::size_t subframes_;
  std::size_t subchannels_;
  std::vector<bool> busy_;
};

/// Uniform pick among idle resources; if none is idle, uniform over all.
Resource select_resource(const BusyMap& view, Rng& rng);

/// Uniform on [5, 15].
int draw_rc(Rng& rng);

struct VehicleState {
  VehicleId vehicle_id = 0;
  std::optional<Resource> selected_resource;
  int rc = 0;
  double keep_probability = 0.8;
  Mode mode = Mode::ledger;
  ledger::LocalLedger ledger;
  bool collided_this_period = false;
  Micros t_last = -1;
};

/// Independent draws for the three per-vehicle random decisions.
struct VehicleStreams {
  Rng selection;
  Rng reselection_counter;
  Rng keep_decision;

  static VehicleStreams for_vehicle(std::uint64_t seed, VehicleId id);
};

enum class Decision { keep, reselect };

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Keep-or-reselect at the end of an SPS period (rc == 0). Baseline keeps
/// with keep_probability; ledger mode reselects exactly when a collision
/// was observed this period. Either way a fresh rc is drawn and the
/// collision flag is cleared.
Decision end_of_period(VehicleState& v, VehicleStreams& streams);

}  // namespace v2xledger::sps
