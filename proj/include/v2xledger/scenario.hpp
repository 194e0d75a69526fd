// Scenario files: one `key = value` per line, '#' starts a comment.
// Every SimConfig and PhyConfig field has a key; unknown keys, duplicate
// keys and unparsable values raise sim::ConfigError naming the key.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "v2xledger/sim.hpp"

namespace v2xledger::scenario {

sim::SimConfig parse(std::string_view text);

/// Throws std::runtime_error if the file cannot be read.
sim::SimConfig load(const std::filesystem::path& path);

/// Every key with its effective value; parse(write(c)) == c.
std::string write(const sim::SimConfig& config);

/// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}. Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace v2xledger::scenario
