// Random inputs shared by the property tests and the acceptance runner.
#pragma once

#include <vector>

#include "v2xledger/local_ledger.hpp"
#include "v2xledger/rng.hpp"

namespace v2xledger::testgen {

/// A packet the codec must accept: slot-aligned collision records no newer
/// than the packet and within the 24-bit offset range.
inline ledger::LedgerPacket random_packet(Rng& rng, ledger::Micros unit = ledger::kDefaultOffsetUnitUs) {
  ledger::LedgerPacket p;
  const auto slots = static_cast<ledger::Micros>(rng.below(rng.below(2) ? 1'000'000 : 100'000'000'000ULL));
  p.timestamp = slots * unit;
  p.vehicle_id = static_cast<ledger::VehicleId>(rng.below(256));
  p.subchannel_id = static_cast<ledger::SubchannelId>(rng.below(256));
  p.subframe_index = static_cast<std::uint16_t>(rng.below(65536));
  const auto count = rng.below(ledger::kMaxCollisionRecords + 1);
  const auto max_back = std::min<ledger::Micros>(slots, ledger::kMaxCollisionOffset);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto back = static_cast<ledger::Micros>(rng.below(static_cast<std::uint64_t>(max_back) + 1));
    p.collision_records.push_back({static_cast<ledger::SubchannelId>(rng.below(256)), p.timestamp - back * unit});
  }
  for (auto& b : p.bsm_payload) b = static_cast<std::uint8_t>(rng.below(256));
  return p;
}

/// Records over a deliberately small key space so that merges collide.
inline ledger::LedgerRecord random_record(Rng& rng, ledger::RecordSource source) {
  ledger::LedgerRecord r;
  r.vehicle_id = static_cast<ledger::VehicleId>(rng.below(4));
  r.timestamp = static_cast<ledger::Micros>(rng.below(6)) * 1000;
  r.subchannel_id = static_cast<ledger::SubchannelId>(rng.below(3));
  r.subframe_index = static_cast<std::uint16_t>(rng.below(6));
  r.source = source;
  return r;
}

inline ledger::CollisionRecord random_collision(Rng& rng) {
  return {static_cast<ledger::SubchannelId>(rng.below(3)), static_cast<ledger::Micros>(rng.below(6)) * 1000};
}

struct RemoteBatch {
  std::vector<ledger::LedgerRecord> records;
  std::vector<ledger::CollisionRecord> collisions;
};

inline RemoteBatch random_batch(Rng& rng) {
  RemoteBatch b;
  const auto n = rng.below(8);
  for (std::uint64_t i = 0; i < n; ++i) b.records.push_back(random_record(rng, ledger::RecordSource::merged_remote));
  const auto m = rng.below(4);
  for (std::uint64_t i = 0; i < m; ++i) b.collisions.push_back(random_collision(rng));
  return b;
}

/// A ledger with a mix of direct and remote knowledge.
inline ledger::LocalLedger random_ledger(Rng& rng) {
  ledger::LocalLedger l;
  const auto n = rng.below(6);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto r = random_record(rng, rng.below(2) ? ledger::RecordSource::decoded_direct : ledger::RecordSource::self);
    l.add_direct(r);
  }
  const auto b = random_batch(rng);
  ledger::merge_remote(l, b.records, b.collisions);
  return l;
}

inline ledger::LocalLedger merged(ledger::LocalLedger l, const RemoteBatch& b) {
  ledger::merge_remote(l, b.records, b.collisions);
  return l;
}

inline RemoteBatch concat(const RemoteBatch& a, const RemoteBatch& b) {
  RemoteBatch out = a;
  out.records.insert(out.records.end(), b.records.begin(), b.records.end());
  out.collisions.insert(out.collisions.end(), b.collisions.begin(), b.collisions.end());
  return out;
}

}  // namespace v2xledger::testgen
