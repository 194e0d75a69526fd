#include "v2xledger/phy_capacity.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace v2xledger::phy {

namespace {

constexpr std::array<Numerology, 4> kNumerologies{{
    {0, 15, 10, 1, 1000, 14, 14, 50},
    {1, 30, 20, 2, 500, 14, 28, 100},
    {2, 60, 40, 4, 250, 14, 56, 200},
    {3, 120, 80, 8, 125, 14, 112, 400},
}};

constexpr int kMaxScale = 9;

std::uint64_t pow10(int exp) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= 10;
  return v;
}

// ceil(a / b) for a >= 0, b > 0
template <typename T>
T ceil_div(T a, T b) {
  return (a + b - 1) / b;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const Numerology& numerology(int mu) {
  if (mu < 0 || mu >= static_cast<int>(kNumerologies.size())) {
    throw std::out_of_range(fmt::format("numerology mu={} not in [0, 3]", mu));
  }
  return kNumerologies[static_cast<std::size_t>(mu)];
}

Decimal::Decimal(std::uint64_t numerator, int scale)
    : numerator_(numerator), denominator_(pow10(scale)), scale_(scale) {
  if (scale < 0 || scale > kMaxScale) throw std::invalid_argument("decimal scale out of range");
}

Decimal Decimal::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty decimal");
  const auto dot = text.find('.');
  const std::string_view int_part = text.substr(0, dot);
  const std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) throw std::invalid_argument(fmt::format("bad decimal '{}'", text));
  if (frac_part.size() > kMaxScale) throw std::invalid_argument(fmt::format("too many digits in '{}'", text));
  auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(int_part) || !all_digits(frac_part) || int_part.size() > 9) {
    throw std::invalid_argument(fmt::format("bad decimal '{}'", text));
  }
  std::uint64_t value = 0;
  for (char c : int_part) value = value * 10 + static_cast<std::uint64_t>(c - '0');
  for (char c : frac_part) value = value * 10 + static_cast<std::uint64_t>(c - '0');
  return Decimal(value, static_cast<int>(frac_part.size()));
}

std::string Decimal::to_string() const {
  if (scale_ == 0) return std::to_string(numerator_);
  std::string frac = std::to_string(numerator_ % denominator_);
  frac.insert(0, static_cast<std::size_t>(scale_) - frac.size(), '0');
  return fmt::format("{}.{}", numerator_ / denominator_, frac);
}

void McsEntry::validate() const {
  if (index < 0 || index > 27) throw std::invalid_argument(fmt::format("MCS index {} not in [0, 27]", index));
  if (modulation_order != 2 && modulation_order != 4 && modulation_order != 6 && modulation_order != 8) {
    throw std::invalid_argument(fmt::format("modulation order {} not in {{2, 4, 6, 8}}", modulation_order));
  }
  if (spectral_efficiency.numerator() == 0) throw std::invalid_argument("spectral efficiency must be > 0");
}

McsEntry default_mcs_entry() { return McsEntry{1, 2, Decimal(2344, 4)}; }

McsTable McsTable::builtin() {
  McsTable table;
  table.insert(default_mcs_entry());
  return table;
}

McsTable McsTable::parse(std::string_view text) {
  McsTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields{std::string(body)};
    McsEntry entry;
    std::string eta;
    std::string extra;
    if (!(fields >> entry.index >> entry.modulation_order >> eta) || (fields >> extra)) {
      throw std::invalid_argument(fmt::format("MCS table line {}: expected '<index> <order> <efficiency>'", line_no));
    }
    try {
      entry.spectral_efficiency = Decimal::parse(eta);
      entry.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("MCS table line {}: {}", line_no, e.what()));
    }
    if (table.contains(entry.index)) {
      throw std::invalid_argument(fmt::format("MCS table line {}: duplicate index {}", line_no, entry.index));
    }
    table.insert(entry);
  }
  return table;
}

McsTable McsTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open MCS table '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void McsTable::insert(const McsEntry& entry) {
  entry.validate();
  entries_.insert_or_assign(entry.index, entry);
}

const McsEntry& McsTable::at(int index) const {
  const auto it = entries_.find(index);
  if (it == entries_.end()) throw std::out_of_range(fmt::format("MCS index {} not in table", index));
  return it->second;
}

std::string_view to_string(SubchannelMode mode) {
  return mode == SubchannelMode::exact_fit ? "exact" : "standard";
}

std::optional<SubchannelMode> subchannel_mode_from_string(std::string_view text) {
  if (text == "exact") return SubchannelMode::exact_fit;
  if (text == "standard") return SubchannelMode::standard;
  return std::nullopt;
}

void PhyConfig::validate() const {
  if (subcarriers_per_rb != 12) throw std::invalid_argument("subcarriers_per_rb must be 12");
  if (sh_symbols < 0 || pfsch_symbols < 0 || overhead_re < 0 || dmrs_re < 0) {
    throw std::invalid_argument("PHY counts must be non-negative");
  }
  if (sh_symbols < pfsch_symbols) throw std::invalid_argument("sh_symbols < pfsch_symbols");
}

std::int64_t re_per_prb(const PhyConfig& cfg) {
  cfg.validate();
  const std::int64_t res =
      std::int64_t{cfg.subcarriers_per_rb} * (cfg.sh_symbols - cfg.pfsch_symbols) - cfg.overhead_re - cfg.dmrs_re;
  if (res <= 0) throw DimensioningError(fmt::format("configuration leaves {} data REs per PRB", res));
  return res;
}

std::int64_t prbs_per_slot(const Numerology& num) {
  // CBW in kHz over SCS in kHz, then over 12 subcarriers, all integer
  return (std::int64_t{num.max_carrier_bw_mhz} * 1000) / (std::int64_t{num.scs_khz} * 12);
}

std::int64_t res_per_package(std::int64_t payload_bytes, const McsEntry& mcs) {
  mcs.validate();
  if (payload_bytes < 0) throw std::invalid_argument("negative payload");
  // bits / M / (n / d) = bits * d / (M * n)
  const auto num = static_cast<uint128>(payload_bytes) * 8 * mcs.spectral_efficiency.denominator();
  const auto den = static_cast<uint128>(mcs.modulation_order) * mcs.spectral_efficiency.numerator();
  return static_cast<std::int64_t>(ceil_div(num, den));
}

std::int64_t prbs_per_package(std::int64_t payload_bytes, const McsEntry& mcs, const PhyConfig& cfg) {
  return ceil_div(res_per_package(payload_bytes, mcs), re_per_prb(cfg));
}

std::int64_t subchannel_prbs(std::int64_t package_prbs, SubchannelMode mode) {
  if (package_prbs <= 0) throw std::invalid_argument("package must occupy at least one PRB");
  if (mode == SubchannelMode::exact_fit) return package_prbs;
  for (int size : kLegalSubchannelSizes) {
    if (size >= package_prbs) return size;
  }
  throw DimensioningError(fmt::format("package of {} PRBs exceeds the largest sub-channel", package_prbs));
}

std::int64_t subchannels_per_slot(const Numerology& num, std::int64_t package_prbs) {
  if (package_prbs <= 0) throw std::invalid_argument("package must occupy at least one PRB");
  const std::int64_t n = prbs_per_slot(num) / package_prbs;
  if (n == 0) {
    throw DimensioningError(
        fmt::format("package of {} PRBs exceeds the {} PRBs of one slot", package_prbs, prbs_per_slot(num)));
  }
  return n;
}

std::int64_t max_vehicles(std::int64_t rri_ms, const Numerology& num, std::int64_t package_prbs) {
  if (rri_ms <= 0) throw std::invalid_argument("RRI must be a positive number of milliseconds");
  return subchannels_per_slot(num, package_prbs) * rri_ms * num.slots_per_subframe;
}

double overhead_fraction(std::int64_t ledger_capacity, std::int64_t baseline_capacity) {
  if (baseline_capacity <= 0) throw std::invalid_argument("baseline capacity must be positive");
  if (ledger_capacity < 0 || ledger_capacity > baseline_capacity) {
    throw std::invalid_argument("ledger capacity must lie in [0, baseline capacity]");
  }
  return static_cast<double>(baseline_capacity - ledger_capacity) / static_cast<double>(baseline_capacity);
}

CapacityReport capacity_report(std::int64_t payload_bytes, const McsEntry& mcs, const PhyConfig& cfg,
                               const Numerology& num, std::int64_t rri_ms) {
  CapacityReport r;
  r.re_per_prb = re_per_prb(cfg);
  r.res_per_package = res_per_package(payload_bytes, mcs);
  r.prbs_per_package = prbs_per_package(payload_bytes, mcs, cfg);
  r.prbs_per_slot = prbs_per_slot(num);
  if (r.prbs_per_package > 0) {
    r.subchannel_prbs = subchannel_prbs(r.prbs_per_package, cfg.subchannel_mode);
    r.subchannels_per_slot = subchannels_per_slot(num, *r.subchannel_prbs);
    r.max_vehicles = max_vehicles(rri_ms, num, *r.subchannel_prbs);
  }
  return r;
}

}  // namespace v2xledger::phy
