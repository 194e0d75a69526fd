// A vehicle's replica of the shared ledger and the per-subframe update that
// turns sensing plus decoded packets into ledger rows and collision records.
#pragma once

#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2xledger/ledger_packet.hpp"

namespace v2xledger::ledger {

enum class RecordSource { decoded_direct, merged_remote, self };

struct LedgerRecord {
  VehicleId vehicle_id = 0;
  SubchannelId subchannel_id = 0;
  std::uint16_t subframe_index = 0;
  Micros timestamp = 0;
  RecordSource source = RecordSource::decoded_direct;

  friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

/// Occupancy of every sub-channel in one subframe as sensed by one vehicle.
struct SensingList {
  std::uint16_t subframe_index = 0;
  Micros timestamp = 0;  // subframe start
  std::vector<bool> busy;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Records are keyed on (timestamp, vehicle_id); collision records on
/// (subframe_timestamp, subchannel_id).
///
/// Merging is a join: a key already observed directly (self or decoded) is
/// never replaced, two remote candidates for the same key resolve to the
/// smaller (subchannel, subframe) pair, and a collision at a position that
/// some record occupies is hidden. Merges are therefore idempotent,
/// commutative and associative.
class LocalLedger {
 public:
  struct Key {
    Micros timestamp;
    VehicleId vehicle_id;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  /// Inserts a record the owner observed itself. Replaces a remote copy of
  /// the same key; keeps an existing direct observation.
  void add_direct(const LedgerRecord& record);

  /// Inserts a record learned from another vehicle under the join rule.
  void add_remote(const LedgerRecord& record);

  void add_collision(const CollisionRecord& record);

  const std::map<Key, LedgerRecord>& records() const { return records_; }

  /// Collision records at positions no record occupies.
  std::vector<CollisionRecord> collisions() const;

  /// Effective collisions with subframe_timestamp in [from, to).
  std::vector<CollisionRecord> collisions_between(Micros from, Micros to) const;

  bool has_record_at(SubchannelId subchannel, Micros timestamp) const;
  bool has_collision_at(SubchannelId subchannel, Micros timestamp) const;

  /// Records (any source) whose timestamp equals `timestamp`.
  std::vector<LedgerRecord> records_at(Micros timestamp) const;

  /// Drops every entry older than `timestamp`.
  void prune_before(Micros timestamp);

  std::size_t record_count() const { return records_.size(); }

  friend bool operator==(const LocalLedger&, const LocalLedger&) = default;

 private:
  std::map<Key, LedgerRecord> records_;
  std::set<CollisionRecord> raw_collisions_;
};

/// One subframe of ledger building for a listening vehicle:
/// decoded packets become records, their carried collision records are
/// merged, and every busy sub-channel that no decoded packet claims becomes
/// a new collision record. Returns the newly inferred collision records.
///
/// Throws ProtocolError when a decoded packet belongs to another subframe.
std::vector<CollisionRecord> ingest_subframe(LocalLedger& ledger, const SensingList& sensed,
                                             std::span<const LedgerPacket> decoded);

/// Set-union merge of records and collision records learned from another
/// vehicle.
void merge_remote(LocalLedger& local, std::span<const LedgerRecord> remote_records,
                  std::span<const CollisionRecord> remote_collisions);

/// Line-oriented dump, ordered by timestamp then vehicle id (records before
/// collisions at equal timestamps):
///   record vehicle=<id> subch=<id> subframe=<n> t=<us>
///   collision subch=<id> t=<us>
std::string dump(const LocalLedger& ledger);

}  // namespace v2xledger::ledger
