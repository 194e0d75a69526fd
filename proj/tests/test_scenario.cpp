#include <gtest/gtest.h>

#include <fstream>

#include "v2xledger/scenario.hpp"

namespace {

using namespace v2xledger;
using namespace v2xledger::scenario;

TEST(Scenario, DefaultsWhenEmpty) { EXPECT_EQ(parse("# nothing here\n\n"), sim::SimConfig{}); }

TEST(Scenario, ParsesEveryKey) {
  const auto c = parse(
      "num_vehicles = 50\nrri_ms=20\nnumerology = 1 # comment\npayload_bytes = 300\nmcs_index = 1\n"
      "num_rris = 30\nseeds = 1, 4-6\nmode = both\nkeep_probability = 0.5\nallow_overload = true\n"
      "subchannels_per_slot = 3\nledger_retention_rris = 3\nsubcarriers_per_rb = 12\nsh_symbols = 11\n"
      "pfsch_symbols = 1\noverhead_re = 2\ndmrs_re = 10\nsubchannel_mode = standard\n");
  EXPECT_EQ(c.num_vehicles, 50u);
  EXPECT_EQ(c.rri_ms, 20);
  EXPECT_EQ(c.numerology, 1);
  EXPECT_EQ(c.payload_bytes, 300);
  EXPECT_EQ(c.num_rris, 30);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 4, 5, 6}));
  EXPECT_EQ(c.mode, sim::RunMode::both);
  EXPECT_EQ(c.keep_probability, 0.5);
  EXPECT_TRUE(c.allow_overload);
  EXPECT_EQ(c.subchannels_override, 3u);
  EXPECT_EQ(c.ledger_retention_rris, 3);
  EXPECT_EQ(c.phy.sh_symbols, 11);
  EXPECT_EQ(c.phy.pfsch_symbols, 1);
  EXPECT_EQ(c.phy.overhead_re, 2);
  EXPECT_EQ(c.phy.dmrs_re, 10);
  EXPECT_EQ(c.phy.subchannel_mode, phy::SubchannelMode::standard);
}

std::string error_field(std::string_view text) {
  try {
    parse(text);
  } catch (const sim::ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Scenario, FieldLevelErrors) {
  EXPECT_EQ(error_field("num_vehicle = 3\n"), "num_vehicle");
  EXPECT_EQ(error_field("num_vehicles = three\n"), "num_vehicles");
  EXPECT_EQ(error_field("num_rris = 20\nnum_rris = 30\n"), "num_rris");
  EXPECT_EQ(error_field("mode = fast\n"), "mode");
  EXPECT_EQ(error_field("seeds = 5-2\n"), "seeds");
  EXPECT_EQ(error_field("keep_probability = high\n"), "keep_probability");
  EXPECT_EQ(error_field("allow_overload = maybe\n"), "allow_overload");
  EXPECT_EQ(error_field("subchannel_mode = loose\n"), "subchannel_mode");
  EXPECT_EQ(error_field("just words\n"), "");
}

TEST(Scenario, WriteThenParseRoundTrips) {
  sim::SimConfig c;
  EXPECT_EQ(parse(write(c)), c);
  c.num_vehicles = 77;
  c.seeds = {1, 2, 3, 9, 11, 12, 40};
  c.mode = sim::RunMode::baseline;
  c.keep_probability = 0.1 + 0.2;  // needs the shortest exact representation
  c.subchannels_override = 4;
  c.phy.subchannel_mode = phy::SubchannelMode::standard;
  EXPECT_EQ(parse(write(c)), c);
}

TEST(Scenario, SeedLists) {
  EXPECT_EQ(parse_seed_list("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(parse_seed_list("1-3,3"), (std::vector<std::uint64_t>{1, 2, 3, 3}));
  EXPECT_THROW(parse_seed_list(""), std::invalid_argument);
  EXPECT_THROW(parse_seed_list("a"), std::invalid_argument);
}

TEST(Scenario, DocumentedExampleLoads) {
  const auto c = load(V2XLEDGER_DATA_DIR "/../docs/scenario_example.txt");
  EXPECT_EQ(c.mode, sim::RunMode::both);
  EXPECT_EQ(c.seeds.size(), 30u);
  EXPECT_NO_THROW(sim::validate(c));
}

TEST(Scenario, MissingFile) { EXPECT_THROW(load("/nonexistent/scenario.txt"), std::runtime_error); }

}  // namespace
