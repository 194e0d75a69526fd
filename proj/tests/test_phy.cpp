#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "v2xledger/phy_capacity.hpp"

namespace {

using namespace v2xledger::phy;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int rational_ceil(const cpp_rational& q) {
  const cpp_int n = boost::multiprecision::numerator(q);
  const cpp_int d = boost::multiprecision::denominator(q);
  return (n + d - 1) / d;
}

TEST(PhyCapacity, WorkedExample350Bytes) {
  const auto r = capacity_report(350, default_mcs_entry(), PhyConfig{}, numerology(0), 100);
  EXPECT_EQ(r.re_per_prb, 132);
  EXPECT_EQ(r.res_per_package, 5973);
  EXPECT_EQ(r.prbs_per_package, 46);
  EXPECT_EQ(r.prbs_per_slot, 277);
  EXPECT_EQ(r.subchannels_per_slot, 6);
  EXPECT_EQ(r.max_vehicles, 600);
}

TEST(PhyCapacity, BsmOnly300Bytes) {
  const auto r = capacity_report(300, default_mcs_entry(), PhyConfig{}, numerology(0), 100);
  EXPECT_EQ(r.res_per_package, 5120);
  EXPECT_EQ(r.prbs_per_package, 39);
  EXPECT_EQ(r.subchannels_per_slot, 7);
  EXPECT_EQ(r.max_vehicles, 700);
  EXPECT_NEAR(overhead_fraction(600, 700), 1.0 - 600.0 / 700.0, 1e-12);
}

TEST(PhyCapacity, EmptyPayloadHasNoSubchannel) {
  const auto r = capacity_report(0, default_mcs_entry(), PhyConfig{}, numerology(0), 100);
  EXPECT_EQ(r.prbs_per_package, 0);
  EXPECT_FALSE(r.subchannels_per_slot.has_value());
  EXPECT_FALSE(r.max_vehicles.has_value());
}

TEST(PhyCapacity, PrbsPerSlotAcrossNumerologies) {
  EXPECT_EQ(prbs_per_slot(numerology(0)), 277);
  EXPECT_EQ(prbs_per_slot(numerology(1)), 277);
  EXPECT_EQ(prbs_per_slot(numerology(3)), 277);
  EXPECT_THROW(numerology(4), std::out_of_range);
  EXPECT_THROW(numerology(-1), std::out_of_range);
}

TEST(PhyCapacity, SlotsPerSubframeScaleCapacity) {
  // same sub-channel count, twice the slots per ms
  EXPECT_EQ(max_vehicles(100, numerology(1), 46), 2 * max_vehicles(100, numerology(0), 46));
}

TEST(PhyCapacity, ResPerPackageMatchesRationalOracle) {
  const McsEntry mcs = default_mcs_entry();
  const cpp_rational eta(2344, 10000);
  for (std::int64_t payload = 0; payload <= 4000; ++payload) {
    const cpp_rational exact = cpp_rational(payload * 8) / mcs.modulation_order / eta;
    ASSERT_EQ(cpp_int(res_per_package(payload, mcs)), rational_ceil(exact)) << "payload " << payload;
  }
}

TEST(PhyCapacity, PrbsPerPackageIsSmallestCoveringCount) {
  const McsEntry mcs = default_mcs_entry();
  for (std::int64_t payload = 1; payload <= 4000; payload += 7) {
    const std::int64_t res = res_per_package(payload, mcs);
    std::int64_t n = 0;
    while (n * 132 < res) ++n;
    ASSERT_EQ(prbs_per_package(payload, mcs, PhyConfig{}), n) << "payload " << payload;
  }
}

TEST(PhyCapacity, PackageSizeIsMonotoneInPayload) {
  const McsEntry mcs = default_mcs_entry();
  std::int64_t prev = 0;
  for (std::int64_t payload = 0; payload <= 2000; ++payload) {
    const std::int64_t prbs = prbs_per_package(payload, mcs, PhyConfig{});
    ASSERT_GE(prbs, prev);
    prev = prbs;
  }
}

TEST(PhyCapacity, CapacityIsLinearInRri) {
  for (std::int64_t rri : {20, 50, 100, 1000}) {
    EXPECT_EQ(max_vehicles(rri, numerology(0), 46), 6 * rri);
  }
}

TEST(PhyCapacity, DataRePerPrbMustBePositive) {
  PhyConfig cfg;
  cfg.sh_symbols = 1;
  EXPECT_THROW(re_per_prb(cfg), DimensioningError);
}

TEST(PhyCapacity, PackageWiderThanCarrier) {
  EXPECT_THROW(subchannels_per_slot(numerology(0), 278), DimensioningError);
  EXPECT_EQ(subchannels_per_slot(numerology(0), 277), 1);
}

TEST(PhyCapacity, StandardSubchannelSizes) {
  EXPECT_EQ(subchannel_prbs(46, SubchannelMode::standard), 50);
  EXPECT_EQ(subchannel_prbs(39, SubchannelMode::standard), 50);
  EXPECT_EQ(subchannel_prbs(10, SubchannelMode::standard), 10);
  EXPECT_EQ(subchannel_prbs(46, SubchannelMode::exact_fit), 46);
  EXPECT_THROW(subchannel_prbs(101, SubchannelMode::standard), DimensioningError);
}

TEST(PhyCapacity, OverheadArguments) {
  EXPECT_DOUBLE_EQ(overhead_fraction(700, 700), 0.0);
  EXPECT_THROW(overhead_fraction(800, 700), std::invalid_argument);
  EXPECT_THROW(overhead_fraction(1, 0), std::invalid_argument);
}

TEST(Decimal, ParseAndCompare) {
  EXPECT_EQ(Decimal::parse("0.2344"), Decimal(2344, 4));
  EXPECT_EQ(Decimal::parse("0.23440"), Decimal(2344, 4));
  EXPECT_EQ(Decimal::parse("2"), Decimal(2, 0));
  EXPECT_EQ(Decimal::parse("0.2344").to_string(), "0.2344");
  EXPECT_THROW(Decimal::parse(""), std::invalid_argument);
  EXPECT_THROW(Decimal::parse("-1"), std::invalid_argument);
  EXPECT_THROW(Decimal::parse("1e3"), std::invalid_argument);
  EXPECT_THROW(Decimal::parse("0.1234567891"), std::invalid_argument);
}

TEST(McsTable, BuiltinAndFileAgree) {
  const McsTable file = McsTable::load(V2XLEDGER_DATA_DIR "/mcs_table.txt");
  ASSERT_TRUE(file.contains(1));
  EXPECT_EQ(file.at(1).modulation_order, McsTable::builtin().at(1).modulation_order);
  EXPECT_EQ(file.at(1).spectral_efficiency, McsTable::builtin().at(1).spectral_efficiency);
}

TEST(McsTable, RejectsBadRows) {
  EXPECT_THROW(McsTable::parse("1 2"), std::invalid_argument);
  EXPECT_THROW(McsTable::parse("1 3 0.5"), std::invalid_argument);
  EXPECT_THROW(McsTable::parse("1 2 0"), std::invalid_argument);
  EXPECT_THROW(McsTable::parse("1 2 0.5\n1 4 0.5"), std::invalid_argument);
  EXPECT_THROW(McsTable::builtin().at(9), std::out_of_range);
  const McsTable t = McsTable::parse("# comment\n\n5 4 1.5\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.at(5).spectral_efficiency, Decimal(15, 1));
}

}  // namespace
