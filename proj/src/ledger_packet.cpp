#include "v2xledger/ledger_packet.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/core.h>

namespace v2xledger::ledger {

namespace {

void put_be(std::span<std::uint8_t> out, std::uint64_t value) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<std::uint8_t>(value & 0xff);
    value >>= 8;
  }
}

std::uint64_t get_be(std::span<const std::uint8_t> in) {
  std::uint64_t value = 0;
  for (std::uint8_t b : in) value = (value << 8) | b;
  return value;
}

void check_unit(Micros offset_unit_us) {
  if (offset_unit_us <= 0) throw std::invalid_argument("offset unit must be positive");
}

}  // namespace

PacketBytes encode_packet(const LedgerPacket& pkt, Micros offset_unit_us) {
  check_unit(offset_unit_us);
  using Kind = CodecError::Kind;
  if (pkt.collision_records.size() > kMaxCollisionRecords) {
    throw CodecError(Kind::record_overflow,
                     fmt::format("{} collision records exceed the header budget of {}", pkt.collision_records.size(),
                                 kMaxCollisionRecords));
  }
  if (pkt.timestamp < 0) throw CodecError(Kind::invalid_field, "negative timestamp");
  if (pkt.subchannel_id > 0xff) throw CodecError(Kind::invalid_field, "sub-channel id does not fit one byte");

  PacketBytes out{};
  const std::span<std::uint8_t> bytes(out);
  bytes[kVersionOffset] = kWireVersion;
  bytes[kVehicleIdOffset] = pkt.vehicle_id;
  // upper two of the ten timestamp bytes stay zero
  put_be(bytes.subspan(kTimestampOffset + 2, 8), static_cast<std::uint64_t>(pkt.timestamp));
  bytes[kSubchannelOffset] = static_cast<std::uint8_t>(pkt.subchannel_id);
  put_be(bytes.subspan(kSubframeOffset, 2), pkt.subframe_index);
  bytes[kCollisionCountOffset] = static_cast<std::uint8_t>(pkt.collision_records.size());

  for (std::size_t i = 0; i < pkt.collision_records.size(); ++i) {
    const CollisionRecord& rec = pkt.collision_records[i];
    if (rec.subchannel_id > 0xff) throw CodecError(Kind::invalid_field, "collision sub-channel does not fit one byte");
    const Micros delta = pkt.timestamp - rec.subframe_timestamp;
    if (delta < 0) throw CodecError(Kind::invalid_field, "collision record is newer than its packet");
    if (delta % offset_unit_us != 0) throw CodecError(Kind::invalid_field, "collision record is not slot aligned");
    if (delta / offset_unit_us > kMaxCollisionOffset) {
      throw CodecError(Kind::invalid_field, "collision record too old for a 24-bit offset");
    }
    const auto slot = bytes.subspan(kCollisionRecordsOffset + i * kCollisionRecordSize, kCollisionRecordSize);
    slot[0] = static_cast<std::uint8_t>(rec.subchannel_id);
    put_be(slot.subspan(1, 3), static_cast<std::uint64_t>(delta / offset_unit_us));
  }

  std::copy(pkt.bsm_payload.begin(), pkt.bsm_payload.end(), bytes.begin() + kHeaderSize);
  return out;
}

LedgerPacket decode_packet(std::span<const std::uint8_t> bytes, Micros offset_unit_us) {
  check_unit(offset_unit_us);
  using Kind = CodecError::Kind;
  if (bytes.size() != kPacketSize) {
    throw CodecError(Kind::malformed_length, fmt::format("packet is {} bytes, expected {}", bytes.size(), kPacketSize));
  }
  if (bytes[kVersionOffset] != kWireVersion) {
    throw CodecError(Kind::malformed_content, fmt::format("unknown version byte 0x{:02x}", bytes[kVersionOffset]));
  }

  LedgerPacket pkt;
  pkt.vehicle_id = bytes[kVehicleIdOffset];
  const auto ts = bytes.subspan(kTimestampOffset, kTimestampSize);
  if (ts[0] != 0 || ts[1] != 0 || (ts[2] & 0x80) != 0) {
    throw CodecError(Kind::malformed_content, "timestamp out of range");
  }
  pkt.timestamp = static_cast<Micros>(get_be(ts.subspan(2)));
  pkt.subchannel_id = bytes[kSubchannelOffset];
  pkt.subframe_index = static_cast<std::uint16_t>(get_be(bytes.subspan(kSubframeOffset, 2)));

  const std::size_t count = bytes[kCollisionCountOffset];
  if (count > kMaxCollisionRecords) {
    throw CodecError(Kind::malformed_content, fmt::format("collision record count {} exceeds {}", count,
                                                          kMaxCollisionRecords));
  }
  pkt.collision_records.reserve(count);
  for (std::size_t i = 0; i < kMaxCollisionRecords; ++i) {
    const auto slot = bytes.subspan(kCollisionRecordsOffset + i * kCollisionRecordSize, kCollisionRecordSize);
    if (i >= count) {
      if (std::any_of(slot.begin(), slot.end(), [](std::uint8_t b) { return b != 0; })) {
        throw CodecError(Kind::malformed_content, "unused collision record slot is not zero");
      }
      continue;
    }
    const auto offset = static_cast<Micros>(get_be(slot.subspan(1, 3)));
    const Micros when = pkt.timestamp - offset * offset_unit_us;
    if (when < 0) throw CodecError(Kind::malformed_content, "collision record predates the scenario");
    pkt.collision_records.push_back(CollisionRecord{slot[0], when});
  }

  if (bytes[kReservedOffset] != 0 || bytes[kReservedOffset + 1] != 0) {
    throw CodecError(Kind::malformed_content, "reserved bytes are not zero");
  }
  std::copy(bytes.begin() + kHeaderSize, bytes.end(), pkt.bsm_payload.begin());
  return pkt;
}

std::vector<CollisionRecord> most_recent_collisions(std::vector<CollisionRecord> records) {
  std::sort(records.begin(), records.end(), [](const CollisionRecord& a, const CollisionRecord& b) {
    return std::tie(a.subframe_timestamp, a.subchannel_id) < std::tie(b.subframe_timestamp, b.subchannel_id);
  });
  if (records.size() > kMaxCollisionRecords) {
    records.erase(records.begin(), records.end() - static_cast<std::ptrdiff_t>(kMaxCollisionRecords));
  }
  return records;
}

BsmPayload bsm_filler(VehicleId vehicle_id, Micros timestamp) {
  BsmPayload body{};
  // xorshift over (id, timestamp); any fixed pattern would do
  std::uint64_t state = (static_cast<std::uint64_t>(timestamp) << 8) ^ vehicle_id ^ 0x9e3779b97f4a7c15ull;
  for (auto& b : body) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    b = static_cast<std::uint8_t>(state);
  }
  return body;
}

Micros timestamp_within_sps(Micros t_last, std::int64_t rri_ms) {
  if (t_last < 0 || rri_ms <= 0) throw std::invalid_argument("timestamp_within_sps: bad arguments");
  return t_last + rri_ms * 1000;
}

Micros timestamp_begin_sps(Micros t_current, std::int64_t n_select, const phy::Numerology& num) {
  if (t_current < 0 || n_select < 0) throw std::invalid_argument("timestamp_begin_sps: bad arguments");
  return t_current + n_select * num.slot_duration_us;
}

VehicleId assign_vehicle_id(const std::set<VehicleId>& existing, Rng& rng) {
  if (existing.size() >= 256) throw NetworkFullError();
  const std::size_t free_count = 256 - existing.size();
  auto pick = rng.below(free_count);
  for (int id = 0; id < 256; ++id) {
    if (existing.contains(static_cast<VehicleId>(id))) continue;
    if (pick == 0) return static_cast<VehicleId>(id);
    --pick;
  }
  throw NetworkFullError();  // unreachable
}

}  // namespace v2xledger::ledger
