#include "v2xledger/local_ledger.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/core.h>

namespace v2xledger::ledger {

namespace {

bool is_direct(RecordSource source) { return source != RecordSource::merged_remote; }

}  // namespace

void LocalLedger::add_direct(const LedgerRecord& record) {
  const Key key{record.timestamp, record.vehicle_id};
  auto it = records_.find(key);
  if (it == records_.end()) {
    records_.emplace(key, record);
  } else if (!is_direct(it->second.source)) {
    it->second = record;
  }
}

void LocalLedger::add_remote(const LedgerRecord& record) {
  const Key key{record.timestamp, record.vehicle_id};
  LedgerRecord incoming = record;
  incoming.source = RecordSource::merged_remote;
  auto it = records_.find(key);
  if (it == records_.end()) {
    records_.emplace(key, incoming);
    return;
  }
  LedgerRecord& existing = it->second;
  if (is_direct(existing.source)) return;
  if (std::tie(incoming.subchannel_id, incoming.subframe_index) <
      std::tie(existing.subchannel_id, existing.subframe_index)) {
    existing = incoming;
  }
}

void LocalLedger::add_collision(const CollisionRecord& record) { raw_collisions_.insert(record); }

bool LocalLedger::has_record_at(SubchannelId subchannel, Micros timestamp) const {
  for (auto it = records_.lower_bound(Key{timestamp, 0}); it != records_.end() && it->first.timestamp == timestamp;
       ++it) {
    if (it->second.subchannel_id == subchannel) return true;
  }
  return false;
}

bool LocalLedger::has_collision_at(SubchannelId subchannel, Micros timestamp) const {
  return raw_collisions_.contains(CollisionRecord{subchannel, timestamp}) && !has_record_at(subchannel, timestamp);
}

std::vector<CollisionRecord> LocalLedger::collisions() const {
  std::vector<CollisionRecord> out;
  for (const auto& c : raw_collisions_) {
    if (!has_record_at(c.subchannel_id, c.subframe_timestamp)) out.push_back(c);
  }
  return out;
}

std::vector<CollisionRecord> LocalLedger::collisions_between(Micros from, Micros to) const {
  std::vector<CollisionRecord> out;
  for (auto it = raw_collisions_.lower_bound(CollisionRecord{0, from});
       it != raw_collisions_.end() && it->subframe_timestamp < to; ++it) {
    if (it->subframe_timestamp >= from && !has_record_at(it->subchannel_id, it->subframe_timestamp)) {
      out.push_back(*it);
    }
  }
  return out;
}

std::vector<LedgerRecord> LocalLedger::records_at(Micros timestamp) const {
  std::vector<LedgerRecord> out;
  for (auto it = records_.lower_bound(Key{timestamp, 0}); it != records_.end() && it->first.timestamp == timestamp;
       ++it) {
    out.push_back(it->second);
  }
  return out;
}

void LocalLedger::prune_before(Micros timestamp) {
  records_.erase(records_.begin(), records_.lower_bound(Key{timestamp, 0}));
  raw_collisions_.erase(raw_collisions_.begin(), raw_collisions_.lower_bound(CollisionRecord{0, timestamp}));
}

std::vector<CollisionRecord> ingest_subframe(LocalLedger& ledger, const SensingList& sensed,
                                             std::span<const LedgerPacket> decoded) {
  const std::size_t width = sensed.busy.size();
  std::vector<bool> claimed(width, false);
  for (const LedgerPacket& pkt : decoded) {
    if (pkt.subframe_index != sensed.subframe_index || pkt.timestamp != sensed.timestamp) {
      throw ProtocolError(fmt::format("packet from vehicle {} for subframe {} (t={}) ingested at subframe {} (t={})",
                                      pkt.vehicle_id, pkt.subframe_index, pkt.timestamp, sensed.subframe_index,
                                      sensed.timestamp));
    }
    if (pkt.subchannel_id >= width) {
      throw ProtocolError(fmt::format("packet claims sub-channel {} of {}", pkt.subchannel_id, width));
    }
    claimed[pkt.subchannel_id] = true;
  }

  for (const LedgerPacket& pkt : decoded) {
    ledger.add_direct(LedgerRecord{pkt.vehicle_id, pkt.subchannel_id, pkt.subframe_index, pkt.timestamp,
                                   RecordSource::decoded_direct});
    for (const CollisionRecord& c : pkt.collision_records) ledger.add_collision(c);
  }

  std::vector<CollisionRecord> inferred;
  for (std::size_t s = 0; s < width; ++s) {
    if (sensed.busy[s] && !claimed[s]) {
      const CollisionRecord rec{static_cast<SubchannelId>(s), sensed.timestamp};
      ledger.add_collision(rec);
      inferred.push_back(rec);
    }
  }
  return inferred;
}

void merge_remote(LocalLedger& local, std::span<const LedgerRecord> remote_records,
                  std::span<const CollisionRecord> remote_collisions) {
  for (const LedgerRecord& r : remote_records) local.add_remote(r);
  for (const CollisionRecord& c : remote_collisions) local.add_collision(c);
}

std::string dump(const LocalLedger& ledger) {
  struct Line {
    Micros t;
    int kind;  // 0 record, 1 collision
    int id;
    std::string text;
  };
  std::vector<Line> lines;
  for (const auto& [key, r] : ledger.records()) {
    lines.push_back({r.timestamp, 0, r.vehicle_id,
                     fmt::format("record vehicle={} subch={} subframe={} t={}", r.vehicle_id, r.subchannel_id,
                                 r.subframe_index, r.timestamp)});
  }
  for (const auto& c : ledger.collisions()) {
    lines.push_back({c.subframe_timestamp, 1, c.subchannel_id,
                     fmt::format("collision subch={} t={}", c.subchannel_id, c.subframe_timestamp)});
  }
  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return std::tie(a.t, a.kind, a.id) < std::tie(b.t, b.kind, b.id); });
  std::string out;
  for (const auto& l : lines) {
    out += l.text;
    out += '\n';
  }
  return out;
}

}  // namespace v2xledger::ledger
