#include "v2xledger/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace v2xledger::scenario {

namespace {

using sim::ConfigError;
using sim::SimConfig;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_int(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), fmt::format("{}: '{}' is not an integer", key, text));
  }
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  // from_chars for double is missing from older libstdc++; strtod on a copy
  const std::string copy(text);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw ConfigError(std::string(key), fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(std::string(key), fmt::format("{}: '{}' is not true/false", key, text));
}

using Setter = std::function<void(SimConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"num_vehicles", [](SimConfig& c, auto k, auto v) { c.num_vehicles = parse_int<std::size_t>(k, v); }},
      {"rri_ms", [](SimConfig& c, auto k, auto v) { c.rri_ms = parse_int<std::int64_t>(k, v); }},
      {"numerology", [](SimConfig& c, auto k, auto v) { c.numerology = parse_int<int>(k, v); }},
      {"payload_bytes", [](SimConfig& c, auto k, auto v) { c.payload_bytes = parse_int<std::int64_t>(k, v); }},
      {"mcs_index", [](SimConfig& c, auto k, auto v) { c.mcs_index = parse_int<int>(k, v); }},
      {"num_rris", [](SimConfig& c, auto k, auto v) { c.num_rris = parse_int<std::int64_t>(k, v); }},
      {"seeds",
       [](SimConfig& c, auto k, auto v) {
         try {
           c.seeds = parse_seed_list(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string(k), fmt::format("{}: {}", k, e.what()));
         }
       }},
      {"mode",
       [](SimConfig& c, auto k, auto v) {
         const auto m = sim::run_mode_from_string(v);
         if (!m) throw ConfigError(std::string(k), fmt::format("{}: '{}' is not baseline|ledger|both", k, v));
         c.mode = *m;
       }},
      {"keep_probability", [](SimConfig& c, auto k, auto v) { c.keep_probability = parse_double(k, v); }},
      {"allow_overload", [](SimConfig& c, auto k, auto v) { c.allow_overload = parse_bool(k, v); }},
      {"subchannels_per_slot",
       [](SimConfig& c, auto k, auto v) {
         c.subchannels_override = v == "auto" ? 0 : parse_int<std::size_t>(k, v);
       }},
      {"ledger_retention_rris", [](SimConfig& c, auto k, auto v) { c.ledger_retention_rris = parse_int<int>(k, v); }},
      {"subcarriers_per_rb", [](SimConfig& c, auto k, auto v) { c.phy.subcarriers_per_rb = parse_int<int>(k, v); }},
      {"sh_symbols", [](SimConfig& c, auto k, auto v) { c.phy.sh_symbols = parse_int<int>(k, v); }},
      {"pfsch_symbols", [](SimConfig& c, auto k, auto v) { c.phy.pfsch_symbols = parse_int<int>(k, v); }},
      {"overhead_re", [](SimConfig& c, auto k, auto v) { c.phy.overhead_re = parse_int<int>(k, v); }},
      {"dmrs_re", [](SimConfig& c, auto k, auto v) { c.phy.dmrs_re = parse_int<int>(k, v); }},
      {"subchannel_mode",
       [](SimConfig& c, auto k, auto v) {
         const auto m = phy::subchannel_mode_from_string(v);
         if (!m) throw ConfigError(std::string(k), fmt::format("{}: '{}' is not exact|standard", k, v));
         c.phy.subchannel_mode = *m;
       }},
  };
  return table;
}

std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  // collapse consecutive runs into ranges
  std::string out;
  for (std::size_t i = 0; i < seeds.size();) {
    std::size_t j = i;
    while (j + 1 < seeds.size() && seeds[j + 1] == seeds[j] + 1) ++j;
    if (!out.empty()) out += ',';
    out += j > i + 1 ? fmt::format("{}-{}", seeds[i], seeds[j]) : std::to_string(seeds[i]);
    if (j == i + 1) out += fmt::format(",{}", seeds[j]);
    i = j + 1;
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  auto number = [](std::string_view s) {
    s = trim(s);
    std::uint64_t v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw std::invalid_argument(fmt::format("bad seed '{}'", s));
    }
    return v;
  };
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const auto lo = number(item.substr(0, dash));
    const auto hi = number(item.substr(dash + 1));
    if (hi < lo || hi - lo >= 1'000'000) throw std::invalid_argument(fmt::format("bad seed range '{}'", item));
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

sim::SimConfig parse(std::string_view text) {
  SimConfig config;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(std::string(key), fmt::format("line {}: unknown key '{}'", line_no, key));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(std::string(key), fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
    it->second(config, key, value);
  }
  return config;
}

sim::SimConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read scenario '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string write(const sim::SimConfig& c) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  line("num_vehicles", c.num_vehicles);
  line("rri_ms", c.rri_ms);
  line("numerology", c.numerology);
  line("payload_bytes", c.payload_bytes);
  line("mcs_index", c.mcs_index);
  line("num_rris", c.num_rris);
  line("seeds", format_seeds(c.seeds));
  line("mode", sim::to_string(c.mode));
  line("keep_probability", c.keep_probability);
  line("allow_overload", c.allow_overload ? "true" : "false");
  line("subchannels_per_slot", c.subchannels_override == 0 ? std::string("auto") : std::to_string(c.subchannels_override));
  line("ledger_retention_rris", c.ledger_retention_rris);
  line("subcarriers_per_rb", c.phy.subcarriers_per_rb);
  line("sh_symbols", c.phy.sh_symbols);
  line("pfsch_symbols", c.phy.pfsch_symbols);
  line("overhead_re", c.phy.overhead_re);
  line("dmrs_re", c.phy.dmrs_re);
  line("subchannel_mode", phy::to_string(c.phy.subchannel_mode));
  return out;
}

}  // namespace v2xledger::scenario
