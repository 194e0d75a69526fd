// The shared sidelink medium and every vehicle's SPS state machine, advanced
// one subframe at a time.
//
// Per subframe: vehicles whose reserved transmission falls on this subframe
// broadcast; every other vehicle senses the subframe, decodes the
// transmissions that are alone on their sub-channel and (ledger mode) folds
// them into its ledger. Transmitters hear nothing in their own subframe.
//
// In ledger mode each broadcast also carries the sender's per-subframe
// ledger view of the last RRI. A receiver uses it only to backfill the
// subframes it could not hear because it was transmitting, which is how a
// collider learns about its own collision.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "v2xledger/phy_capacity.hpp"
#include "v2xledger/sps.hpp"

namespace v2xledger::sps {

struct WorldConfig {
  std::size_t num_vehicles = 100;
  int mu = 0;
  std::int64_t rri_ms = 100;
  std::size_t subchannels_per_slot = 6;
  Mode mode = Mode::ledger;
  double keep_probability = 0.8;
  std::uint64_t seed = 1;
  /// Ledger rows older than this many RRIs are dropped.
  int ledger_retention_rris = 2;
  bool record_transmissions = false;
  /// Optional initial reservation per vehicle, in ascending id order; empty
  /// means every vehicle draws from an all-idle view.
  std::vector<Resource> initial_resources;
};

struct CollisionEvent {
  std::int64_t rri_index = 0;
  std::uint16_t subframe_index = 0;
  SubchannelId subchannel_id = 0;
  std::vector<VehicleId> colliders;  // ascending
  Micros t_trans = 0;

  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

/// First moment a vehicle learned that its transmission at t_trans collided.
struct AwarenessEvent {
  VehicleId vehicle = 0;
  Micros t_trans = 0;
  Micros learned_at = 0;
};

struct TransmissionRecord {
  Micros t = 0;
  std::int64_t rri_index = 0;
  Resource resource;
  VehicleId vehicle = 0;
  bool collided = false;
};

struct SubframeOutcome {
  std::vector<CollisionEvent> collisions;
  std::size_t transmissions = 0;
  std::size_t colliding_transmissions = 0;
};

class World {
 public:
  explicit World(const WorldConfig& config);
  ~World();
  World(World&&) noexcept;
  World& operator=(World&&) noexcept;

  /// Subframes must be advanced in order, starting at (0, 0).
  SubframeOutcome advance_subframe(std::int64_t rri_index, std::uint16_t subframe_index);

  const WorldConfig& config() const { return config_; }
  const phy::Numerology& numerology() const { return *numerology_; }
  std::size_t subframes_per_rri() const { return subframes_; }
  Micros rri_us() const { return config_.rri_ms * 1000; }
  Micros subframe_start(std::int64_t rri_index, std::uint16_t subframe_index) const;

  std::size_t vehicle_count() const;
  /// Vehicles in ascending id order.
  const VehicleState& vehicle(std::size_t i) const;
  /// Start of the vehicle's next scheduled transmission.
  Micros next_transmission(std::size_t i) const;

  const std::vector<AwarenessEvent>& awareness_log() const { return awareness_; }
  const std::vector<TransmissionRecord>& transmission_log() const { return transmissions_; }

 private:
  struct Vehicle;
  struct Broadcast;

  void receive(Vehicle& v, std::uint16_t subframe_index, Micros now, const SensingList& sensed,
               const std::vector<const Broadcast*>& decoded, const std::vector<ledger::LedgerPacket>& packets);
  void after_transmit(Vehicle& v, std::uint16_t subframe_index, Micros now);
  void note_own_collision(Vehicle& v, const ledger::CollisionRecord& c, Micros now);

  WorldConfig config_;
  const phy::Numerology* numerology_;
  std::size_t subframes_;
  ResourceGrid grid_;
  std::vector<Vehicle> vehicles_;
  std::vector<AwarenessEvent> awareness_;
  std::vector<TransmissionRecord> transmissions_;
  std::int64_t next_rri_ = 0;
  std::uint16_t next_subframe_ = 0;
};

}  // namespace v2xledger::sps
