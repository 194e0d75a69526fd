// The 350-byte ledger broadcast: a 300-byte BSM body behind a 50-byte ledger
// header, its wire codec, and the transmit-timestamp rules.
//
// Header layout (big-endian):
//
//   offset  size  field
//   0       1     version (kWireVersion)
//   1       1     vehicle id
//   2       10    timestamp, microseconds since scenario start, zero-padded
//   12      1     sub-channel id
//   13      2     subframe index within the RRI
//   15      1     collision record count (<= 8)
//   16      32    8 x collision record {1 B sub-channel, 3 B offset}
//   48      2     reserved, zero
//   50      300   BSM body
//
// A collision record's offset counts offset units (one slot) back from the
// packet timestamp to the start of the subframe where the collision was
// sensed. Unused record slots are zero.
#pragma once

#include <array>
#include <cstdint>
#include <compare>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "v2xledger/phy_capacity.hpp"
#include "v2xledger/rng.hpp"

namespace v2xledger::ledger {

using VehicleId = std::uint8_t;
using SubchannelId = std::uint16_t;
/// Microseconds since scenario start.
using Micros = std::int64_t;

inline constexpr std::size_t kPacketSize = 350;
inline constexpr std::size_t kHeaderSize = 50;
inline constexpr std::size_t kBsmPayloadSize = 300;
inline constexpr std::size_t kVersionOffset = 0;
inline constexpr std::size_t kVehicleIdOffset = 1;
inline constexpr std::size_t kTimestampOffset = 2;
inline constexpr std::size_t kTimestampSize = 10;
inline constexpr std::size_t kSubchannelOffset = 12;
inline constexpr std::size_t kSubframeOffset = 13;
inline constexpr std::size_t kCollisionCountOffset = 15;
inline constexpr std::size_t kCollisionRecordsOffset = 16;
inline constexpr std::size_t kCollisionRecordSize = 4;
inline constexpr std::size_t kMaxCollisionRecords = 8;
inline constexpr std::size_t kReservedOffset = 48;
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::uint32_t kMaxCollisionOffset = (1u << 24) - 1;
/// One 1 ms subframe.
inline constexpr Micros kDefaultOffsetUnitUs = 1000;

static_assert(kCollisionRecordsOffset + kMaxCollisionRecords * kCollisionRecordSize == kReservedOffset);
static_assert(kHeaderSize + kBsmPayloadSize == kPacketSize);

struct CollisionRecord {
  SubchannelId subchannel_id = 0;
  Micros subframe_timestamp = 0;

  /// Time first, so ordered containers can be scanned by time range.
  friend std::strong_ordering operator<=>(const CollisionRecord& a, const CollisionRecord& b) {
    if (const auto c = a.subframe_timestamp <=> b.subframe_timestamp; c != 0) return c;
    return a.subchannel_id <=> b.subchannel_id;
  }
  friend bool operator==(const CollisionRecord&, const CollisionRecord&) = default;
};

using BsmPayload = std::array<std::uint8_t, kBsmPayloadSize>;

struct LedgerPacket {
  Micros timestamp = 0;
  VehicleId vehicle_id = 0;
  SubchannelId subchannel_id = 0;
  std::uint16_t subframe_index = 0;
  std::vector<CollisionRecord> collision_records;
  BsmPayload bsm_payload{};

  friend bool operator==(const LedgerPacket&, const LedgerPacket&) = default;
};

using PacketBytes = std::array<std::uint8_t, kPacketSize>;

class CodecError : public std::runtime_error {
 public:
  enum class Kind {
    record_overflow,    // more collision records than the header holds
    invalid_field,      // a field value the layout cannot represent
    malformed_length,   // input is not exactly kPacketSize bytes
    malformed_content,  // bad version, reserved bits or record slots
  };

  CodecError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

PacketBytes encode_packet(const LedgerPacket& pkt, Micros offset_unit_us = kDefaultOffsetUnitUs);

LedgerPacket decode_packet(std::span<const std::uint8_t> bytes, Micros offset_unit_us = kDefaultOffsetUnitUs);

/// Keeps the kMaxCollisionRecords most recent records (by subframe
/// timestamp), oldest first.
std::vector<CollisionRecord> most_recent_collisions(std::vector<CollisionRecord> records);

/// Deterministic filler for the BSM body; its content never affects
/// scheduling.
BsmPayload bsm_filler(VehicleId vehicle_id, Micros timestamp);

/// Next transmission inside the current SPS period: t_last + RRI.
Micros timestamp_within_sps(Micros t_last, std::int64_t rri_ms);

/// First transmission of a new SPS period: t_current + n_select slots.
Micros timestamp_begin_sps(Micros t_current, std::int64_t n_select, const phy::Numerology& num);

class NetworkFullError : public std::runtime_error {
 public:
  NetworkFullError() : std::runtime_error("all 256 vehicle ids are in use") {}
};

/// Uniform draw among the ids not in `existing`.
VehicleId assign_vehicle_id(const std::set<VehicleId>& existing, Rng& rng);

}  // namespace v2xledger::ledger
