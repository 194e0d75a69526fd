#include "v2xledger/world.hpp"

#include <algorithm>
#include <deque>

#include <fmt/core.h>

namespace v2xledger::sps {

using ledger::CollisionRecord;
using ledger::LedgerPacket;
using ledger::LedgerRecord;
using ledger::RecordSource;

namespace {

/// What one vehicle saw in one subframe it listened to.
struct Snapshot {
  Micros t = -1;
  std::uint16_t subframe_index = 0;
  std::vector<LedgerRecord> records;
  std::vector<SubchannelId> collided;
};

}  // namespace

struct World::Broadcast {
  std::size_t sender = 0;  // index into vehicles_
  Resource resource;
  ledger::PacketBytes bytes{};
  /// Sender's snapshots of the last RRI, ascending by time (ledger mode).
  std::shared_ptr<const std::vector<Snapshot>> share;
};

struct World::Vehicle {
  VehicleState state;
  VehicleStreams streams;
  Micros next_tx = 0;
  Micros resource_since = 0;
  BusyMap known;
  std::vector<Micros> row_time;  // -1 when the row is unmonitored
  std::vector<Snapshot> ring;    // by subframe index
  std::vector<Micros> pending_backfill;
  std::deque<std::pair<Micros, Resource>> own_tx;
  std::set<Micros> aware_of;

  Vehicle(VehicleState s, VehicleStreams st, std::size_t subframes, std::size_t subchannels)
      : state(std::move(s)),
        streams(std::move(st)),
        known(subframes, subchannels),
        row_time(subframes, -1),
        ring(subframes) {}
};

World::World(const WorldConfig& config)
    : config_(config),
      numerology_(&phy::numerology(config.mu)),
      subframes_(static_cast<std::size_t>(config.rri_ms) * static_cast<std::size_t>(numerology_->slots_per_subframe)),
      grid_(subframes_, config.subchannels_per_slot) {
  if (config.rri_ms <= 0) throw std::invalid_argument("RRI must be positive");
  if (config.subchannels_per_slot > 256) throw std::invalid_argument("sub-channel ids must fit one byte");
  if (config.keep_probability < 0.0 || config.keep_probability > 1.0) {
    throw std::invalid_argument("keep probability must lie in [0, 1]");
  }
  if (config.num_vehicles > 256) throw ledger::NetworkFullError();
  if (!config.initial_resources.empty()) {
    if (config.initial_resources.size() != config.num_vehicles) {
      throw std::invalid_argument("one initial resource per vehicle is required");
    }
    for (const Resource& r : config.initial_resources) {
      if (r.subframe_index >= subframes_ || r.subchannel_id >= config.subchannels_per_slot) {
        throw std::invalid_argument("initial resource outside the grid");
      }
    }
  }

  Rng env = Rng::stream(config.seed, 0, StreamPurpose::environment);
  std::set<VehicleId> ids;
  for (std::size_t i = 0; i < config.num_vehicles; ++i) ids.insert(ledger::assign_vehicle_id(ids, env));

  // everyone joins at t = 0 and picks from an all-idle view
  const BusyMap all_idle(subframes_, config.subchannels_per_slot);
  vehicles_.reserve(ids.size());
  for (VehicleId id : ids) {
    VehicleState s;
    s.vehicle_id = id;
    s.keep_probability = config.keep_probability;
    s.mode = config.mode;
    Vehicle v(std::move(s), VehicleStreams::for_vehicle(config.seed, id), subframes_, config.subchannels_per_slot);
    const Resource drawn = select_resource(all_idle, v.streams.selection);
    const Resource r = config.initial_resources.empty() ? drawn : config.initial_resources[vehicles_.size()];
    v.state.selected_resource = r;
    v.state.rc = draw_rc(v.streams.reselection_counter);
    v.next_tx = ledger::timestamp_begin_sps(0, r.subframe_index, *numerology_);
    v.resource_since = v.next_tx;
    vehicles_.push_back(std::move(v));
  }
}

World::~World() = default;
World::World(World&&) noexcept = default;
World& World::operator=(World&&) noexcept = default;

Micros World::subframe_start(std::int64_t rri_index, std::uint16_t subframe_index) const {
  return (rri_index * static_cast<std::int64_t>(subframes_) + subframe_index) * numerology_->slot_duration_us;
}

std::size_t World::vehicle_count() const { return vehicles_.size(); }
const VehicleState& World::vehicle(std::size_t i) const { return vehicles_.at(i).state; }
Micros World::next_transmission(std::size_t i) const { return vehicles_.at(i).next_tx; }

SubframeOutcome World::advance_subframe(std::int64_t rri_index, std::uint16_t subframe_index) {
  if (rri_index != next_rri_ || subframe_index != next_subframe_) {
    throw std::logic_error(fmt::format("advance_subframe({}, {}) out of order; expected ({}, {})", rri_index,
                                       subframe_index, next_rri_, next_subframe_));
  }
  if (++next_subframe_ == subframes_) {
    next_subframe_ = 0;
    ++next_rri_;
  }

  const Micros now = subframe_start(rri_index, subframe_index);
  const bool ledger_mode = config_.mode == Mode::ledger;
  if (subframe_index == 0) {
    grid_.clear();
    if (ledger_mode) {
      const Micros horizon = now - config_.ledger_retention_rris * rri_us();
      for (auto& v : vehicles_) v.state.ledger.prune_before(horizon);
    }
  }

  // transmit
  std::vector<std::size_t> tx;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (vehicles_[i].next_tx == now) tx.push_back(i);
  }
  std::vector<Broadcast> broadcasts;
  broadcasts.reserve(tx.size());
  for (std::size_t i : tx) {
    Vehicle& v = vehicles_[i];
    const Resource r = *v.state.selected_resource;
    if (r.subframe_index != subframe_index) throw std::logic_error("reservation does not match its subframe");
    grid_.place(v.state.vehicle_id, r);
    Broadcast b;
    b.sender = i;
    b.resource = r;
    if (ledger_mode) {
      LedgerPacket pkt;
      pkt.timestamp = now;
      pkt.vehicle_id = v.state.vehicle_id;
      pkt.subchannel_id = r.subchannel_id;
      pkt.subframe_index = subframe_index;
      pkt.collision_records = ledger::most_recent_collisions(v.state.ledger.collisions_between(now - rri_us() + 1, now));
      pkt.bsm_payload = ledger::bsm_filler(pkt.vehicle_id, now);
      b.bytes = ledger::encode_packet(pkt, numerology_->slot_duration_us);

      auto share = std::make_shared<std::vector<Snapshot>>();
      for (const Snapshot& snap : v.ring) {
        if (snap.t > now - rri_us()) share->push_back(snap);
      }
      std::sort(share->begin(), share->end(), [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });
      b.share = std::move(share);
    }
    broadcasts.push_back(std::move(b));
  }

  // resolve the medium
  SubframeOutcome outcome;
  outcome.transmissions = broadcasts.size();
  std::vector<const Broadcast*> decodable;
  std::vector<LedgerPacket> packets;
  for (std::size_t s = 0; s < grid_.subchannels_per_slot(); ++s) {
    const Resource at{subframe_index, static_cast<SubchannelId>(s)};
    const auto& who = grid_.transmitters(at);
    if (who.size() >= 2) {
      CollisionEvent ev{rri_index, subframe_index, at.subchannel_id, who, now};
      std::sort(ev.colliders.begin(), ev.colliders.end());
      outcome.colliding_transmissions += who.size();
      outcome.collisions.push_back(std::move(ev));
    }
  }
  for (const Broadcast& b : broadcasts) {
    const bool alone = grid_.transmitters(b.resource).size() == 1;
    if (config_.record_transmissions) {
      transmissions_.push_back(
          TransmissionRecord{now, rri_index, b.resource, vehicles_[b.sender].state.vehicle_id, !alone});
    }
    if (!alone) continue;
    decodable.push_back(&b);
    if (ledger_mode) packets.push_back(ledger::decode_packet(b.bytes, numerology_->slot_duration_us));
  }

  // listen
  const SensingList sensed = sense(grid_, subframe_index, now);
  std::size_t next_tx_pos = 0;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (next_tx_pos < tx.size() && tx[next_tx_pos] == i) {
      ++next_tx_pos;
      continue;  // half-duplex
    }
    receive(vehicles_[i], subframe_index, now, sensed, decodable, packets);
  }

  for (std::size_t i : tx) after_transmit(vehicles_[i], subframe_index, now);
  return outcome;
}

void World::note_own_collision(Vehicle& v, const CollisionRecord& c, Micros now) {
  for (const auto& [t, r] : v.own_tx) {
    if (t != c.subframe_timestamp || r.subchannel_id != c.subchannel_id) continue;
    if (!v.aware_of.insert(t).second) return;
    awareness_.push_back(AwarenessEvent{v.state.vehicle_id, t, now});
    if (t >= v.resource_since) v.state.collided_this_period = true;
    return;
  }
}

void World::receive(Vehicle& v, std::uint16_t subframe_index, Micros now, const SensingList& sensed,
                    const std::vector<const Broadcast*>& decoded, const std::vector<LedgerPacket>& packets) {
  v.known.set_row(subframe_index, sensed.busy);
  v.row_time[subframe_index] = now;
  if (v.state.mode != Mode::ledger) return;

  const auto inferred = ledger::ingest_subframe(v.state.ledger, sensed, packets);
  for (const LedgerPacket& pkt : packets) {
    for (const CollisionRecord& c : pkt.collision_records) note_own_collision(v, c, now);
  }

  Snapshot& snap = v.ring[subframe_index];
  snap.t = now;
  snap.subframe_index = subframe_index;
  snap.records.clear();
  snap.collided.clear();
  for (const LedgerPacket& pkt : packets) {
    snap.records.push_back(
        LedgerRecord{pkt.vehicle_id, pkt.subchannel_id, pkt.subframe_index, pkt.timestamp, RecordSource::decoded_direct});
  }
  for (const CollisionRecord& c : inferred) snap.collided.push_back(c.subchannel_id);

  // backfill the subframes this vehicle spent transmitting
  std::erase_if(v.pending_backfill, [&](Micros t) { return t + rri_us() <= now; });
  if (v.pending_backfill.empty()) return;
  for (const Broadcast* b : decoded) {
    for (auto it = v.pending_backfill.begin(); it != v.pending_backfill.end();) {
      const Micros t = *it;
      const auto& share = *b->share;
      const auto found = std::lower_bound(share.begin(), share.end(), t,
                                          [](const Snapshot& s, Micros when) { return s.t < when; });
      if (found == share.end() || found->t != t) {
        ++it;
        continue;
      }
      std::vector<CollisionRecord> collided;
      collided.reserve(found->collided.size());
      for (SubchannelId s : found->collided) collided.push_back(CollisionRecord{s, t});
      ledger::merge_remote(v.state.ledger, found->records, collided);

      if (t > v.row_time[found->subframe_index]) {
        v.known.fill_row(found->subframe_index, false);
        for (const LedgerRecord& r : found->records) v.known.set(Resource{found->subframe_index, r.subchannel_id}, true);
        for (SubchannelId s : found->collided) v.known.set(Resource{found->subframe_index, s}, true);
        v.row_time[found->subframe_index] = t;
      }
      for (const CollisionRecord& c : collided) note_own_collision(v, c, now);
      it = v.pending_backfill.erase(it);
    }
    if (v.pending_backfill.empty()) break;
  }
}

void World::after_transmit(Vehicle& v, std::uint16_t subframe_index, Micros now) {
  const Resource r = *v.state.selected_resource;
  v.state.t_last = now;
  v.own_tx.emplace_back(now, r);
  while (!v.own_tx.empty() && v.own_tx.front().first + 3 * rri_us() <= now) v.own_tx.pop_front();
  while (!v.aware_of.empty() && *v.aware_of.begin() + 3 * rri_us() <= now) v.aware_of.erase(v.aware_of.begin());

  if (v.state.mode == Mode::ledger) {
    v.state.ledger.add_direct(
        LedgerRecord{v.state.vehicle_id, r.subchannel_id, subframe_index, now, RecordSource::self});
    v.pending_backfill.push_back(now);
    if (v.row_time[subframe_index] < 0) v.known.fill_row(subframe_index, true);
  } else {
    // a subframe spent transmitting is unmonitored and excluded from selection
    v.known.fill_row(subframe_index, true);
    v.row_time[subframe_index] = -1;
  }

  --v.state.rc;
  if (v.state.rc > 0 || end_of_period(v.state, v.streams) == Decision::keep) {
    v.next_tx = ledger::timestamp_within_sps(now, config_.rri_ms);
    return;
  }
  const Resource next = select_resource(v.known, v.streams.selection);
  const std::int64_t n_select = static_cast<std::int64_t>(subframes_ - subframe_index) + next.subframe_index;
  v.state.selected_resource = next;
  v.next_tx = ledger::timestamp_begin_sps(now, n_select, *numerology_);
  v.resource_since = v.next_tx;
}

}  // namespace v2xledger::sps
