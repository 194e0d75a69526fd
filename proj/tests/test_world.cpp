#include <gtest/gtest.h>

#include <map>

#include "v2xledger/world.hpp"

namespace {

using namespace v2xledger;
using namespace v2xledger::sps;

std::vector<CollisionEvent> advance_rri(World& w, std::int64_t rri) {
  std::vector<CollisionEvent> events;
  for (std::size_t sf = 0; sf < w.subframes_per_rri(); ++sf) {
    auto out = w.advance_subframe(rri, static_cast<std::uint16_t>(sf));
    events.insert(events.end(), out.collisions.begin(), out.collisions.end());
  }
  return events;
}

TEST(World, LoneVehicleNeverCollides) {
  WorldConfig c;
  c.num_vehicles = 1;
  World w(c);
  for (int rri = 0; rri < 20; ++rri) EXPECT_TRUE(advance_rri(w, rri).empty());
}

TEST(World, SharedResourceIsOneEvent) {
  WorldConfig c;
  c.num_vehicles = 2;
  c.rri_ms = 10;
  c.subchannels_per_slot = 2;
  c.initial_resources = {{4, 1}, {4, 1}};
  World w(c);
  const auto events = advance_rri(w, 0);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].subframe_index, 4);
  EXPECT_EQ(events[0].subchannel_id, 1);
  EXPECT_EQ(events[0].t_trans, 4000);
  EXPECT_EQ(events[0].colliders, (std::vector<VehicleId>{w.vehicle(0).vehicle_id, w.vehicle(1).vehicle_id}));
  // neither colliding packet was decoded by the other
  EXPECT_EQ(w.vehicle(0).ledger.record_count(), 1u);
  EXPECT_EQ(w.vehicle(1).ledger.record_count(), 1u);
}

TEST(World, ThirdPartyReportsCollision) {
  // A and B share (5, 0); C alone on (9, 1) hears the collision and reports it
  WorldConfig c;
  c.num_vehicles = 3;
  c.rri_ms = 20;
  c.subchannels_per_slot = 2;
  c.initial_resources = {{5, 0}, {5, 0}, {9, 1}};
  World w(c);
  for (std::uint16_t sf = 0; sf <= 8; ++sf) w.advance_subframe(0, sf);
  EXPECT_FALSE(w.vehicle(0).collided_this_period);
  EXPECT_FALSE(w.vehicle(1).collided_this_period);
  EXPECT_TRUE(w.vehicle(2).ledger.has_collision_at(0, 5000));

  w.advance_subframe(0, 9);
  EXPECT_TRUE(w.vehicle(0).collided_this_period);
  EXPECT_TRUE(w.vehicle(1).collided_this_period);
  EXPECT_FALSE(w.vehicle(2).collided_this_period);
  ASSERT_EQ(w.awareness_log().size(), 2u);
  for (const auto& a : w.awareness_log()) {
    EXPECT_EQ(a.t_trans, 5000);
    EXPECT_EQ(a.learned_at, 9000);
  }
  EXPECT_TRUE(w.vehicle(0).ledger.has_record_at(1, 9000));
}

TEST(World, BaselineCollidersStayUnaware) {
  WorldConfig c;
  c.num_vehicles = 3;
  c.rri_ms = 20;
  c.subchannels_per_slot = 2;
  c.mode = Mode::baseline;
  c.initial_resources = {{5, 0}, {5, 0}, {9, 1}};
  World w(c);
  advance_rri(w, 0);
  EXPECT_FALSE(w.vehicle(0).collided_this_period);
  EXPECT_TRUE(w.awareness_log().empty());
  EXPECT_EQ(w.vehicle(0).ledger.record_count(), 0u);
}

TEST(World, SubframesAdvanceInOrder) {
  World w(WorldConfig{});
  w.advance_subframe(0, 0);
  EXPECT_THROW(w.advance_subframe(0, 2), std::logic_error);
}

WorldConfig busy_world(Mode mode, std::uint64_t seed) {
  WorldConfig c;
  c.num_vehicles = 100;
  c.mode = mode;
  c.seed = seed;
  c.record_transmissions = true;
  return c;
}

TEST(World, EveryVehicleTransmitsOncePerRri) {
  for (Mode mode : {Mode::baseline, Mode::ledger}) {
    World w(busy_world(mode, 3));
    for (int rri = 0; rri < 40; ++rri) advance_rri(w, rri);
    std::map<std::pair<std::int64_t, VehicleId>, int> per_rri;
    for (const auto& t : w.transmission_log()) ++per_rri[{t.rri_index, t.vehicle}];
    EXPECT_EQ(per_rri.size(), 40u * 100u);
    for (const auto& [key, n] : per_rri) ASSERT_EQ(n, 1);
  }
}

TEST(World, IdenticalSeedsIdenticalRuns) {
  World a(busy_world(Mode::ledger, 17));
  World b(busy_world(Mode::ledger, 17));
  for (int rri = 0; rri < 30; ++rri) ASSERT_EQ(advance_rri(a, rri), advance_rri(b, rri));
  ASSERT_EQ(a.transmission_log().size(), b.transmission_log().size());
  for (std::size_t i = 0; i < a.transmission_log().size(); ++i) {
    EXPECT_EQ(a.transmission_log()[i].resource, b.transmission_log()[i].resource);
  }
}

TEST(World, CollisionFreePeriodIsAbsorbing) {
  // once a vehicle has held a resource without collision for a full maximal
  // period it neither moves nor collides again
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    World w(busy_world(Mode::ledger, seed));
    for (int rri = 0; rri < 80; ++rri) advance_rri(w, rri);
    std::map<VehicleId, std::vector<TransmissionRecord>> by_vehicle;
    for (const auto& t : w.transmission_log()) by_vehicle[t.vehicle].push_back(t);
    for (const auto& [id, txs] : by_vehicle) {
      int clean_run = 0;
      bool settled = false;
      for (std::size_t k = 0; k < txs.size(); ++k) {
        if (settled) {
          ASSERT_FALSE(txs[k].collided) << "seed " << seed << " vehicle " << int(id) << " rri " << k;
          ASSERT_EQ(txs[k].resource, txs[k - 1].resource);
          continue;
        }
        const bool same = k > 0 && txs[k].resource == txs[k - 1].resource;
        clean_run = txs[k].collided ? 0 : (same ? clean_run + 1 : 1);
        settled = clean_run > kMaxReselectionCounter;
      }
    }
  }
}

}  // namespace
