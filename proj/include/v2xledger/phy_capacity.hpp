// Sidelink physical-resource dimensioning: numerology table, RE/PRB
// accounting and the vehicle capacity of one resource reservation interval.
//
// All arithmetic is exact. Spectral efficiencies are carried as decimal
// fractions (numerator / 10^k) so that ceilings and floors never depend on
// binary floating point.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace v2xledger::phy {

__extension__ using uint128 = unsigned __int128;

/// Raised when a configuration leaves no room for data or a package does
/// not fit on the carrier.
class DimensioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One row of the NR sidelink numerology table.
struct Numerology {
  int mu;
  int scs_khz;
  int slots_per_frame;
  int slots_per_subframe;
  int slot_duration_us;
  int symbols_per_slot;
  int symbols_per_subframe;
  int max_carrier_bw_mhz;

  double slot_duration_ms() const { return slot_duration_us / 1000.0; }
};

/// Table row for `mu` in [0, 3]; throws std::out_of_range otherwise.
const Numerology& numerology(int mu);

/// Non-negative decimal value held as numerator / 10^scale.
class Decimal {
 public:
  Decimal() = default;
  Decimal(std::uint64_t numerator, int scale);

  /// Plain decimal notation only ("0.2344", "2"); at most 9 fractional
  /// digits. Throws std::invalid_argument.
  static Decimal parse(std::string_view text);

  std::uint64_t numerator() const { return numerator_; }
  std::uint64_t denominator() const { return denominator_; }
  int scale() const { return scale_; }
  double to_double() const { return static_cast<double>(numerator_) / static_cast<double>(denominator_); }
  std::string to_string() const;

  friend bool operator==(const Decimal& a, const Decimal& b) {
    // cross-multiplication; both denominators are powers of ten <= 10^9
    return static_cast<uint128>(a.numerator_) * b.denominator_ ==
           static_cast<uint128>(b.numerator_) * a.denominator_;
  }

 private:
  std::uint64_t numerator_ = 0;
  std::uint64_t denominator_ = 1;
  int scale_ = 0;
};

struct McsEntry {
  int index = 0;
  int modulation_order = 2;
  Decimal spectral_efficiency;

  void validate() const;
};

/// Built-in MCS index 1: QPSK, eta = 0.2344.
McsEntry default_mcs_entry();

/// Index -> entry table. Text format, one row per line:
///   <index> <modulation_order> <spectral_efficiency>
/// Blank lines and lines starting with '#' are ignored.
class McsTable {
 public:
  McsTable() = default;

  static McsTable builtin();
  static McsTable parse(std::string_view text);
  static McsTable load(const std::filesystem::path& path);

  void insert(const McsEntry& entry);
  const McsEntry& at(int index) const;
  bool contains(int index) const { return entries_.contains(index); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<int, McsEntry> entries_;
};

enum class SubchannelMode {
  exact_fit,  // one sub-channel is exactly the PRBs one package needs
  standard,   // round up to the next legal sub-channel size
};

std::string_view to_string(SubchannelMode mode);
std::optional<SubchannelMode> subchannel_mode_from_string(std::string_view text);

struct PhyConfig {
  int subcarriers_per_rb = 12;
  int sh_symbols = 12;
  int pfsch_symbols = 0;
  int overhead_re = 0;
  int dmrs_re = 12;
  SubchannelMode subchannel_mode = SubchannelMode::exact_fit;

  void validate() const;
  friend bool operator==(const PhyConfig&, const PhyConfig&) = default;
};

inline constexpr int kLegalSubchannelSizes[] = {10, 12, 15, 20, 25, 50, 75, 100};

/// REs available for PSSCH data in one PRB.
std::int64_t re_per_prb(const PhyConfig& cfg);

/// floor(CBW_max / SCS / 12).
std::int64_t prbs_per_slot(const Numerology& num);

/// ceil(payload_bits / M_order / eta).
std::int64_t res_per_package(std::int64_t payload_bytes, const McsEntry& mcs);

/// ceil(res_per_package / re_per_prb). Rounds up so the allocation covers
/// the whole transport block.
std::int64_t prbs_per_package(std::int64_t payload_bytes, const McsEntry& mcs, const PhyConfig& cfg);

/// Sub-channel width for a package of `package_prbs` PRBs. In standard mode
/// the next legal size is used; a package wider than the largest legal size
/// is a DimensioningError.
std::int64_t subchannel_prbs(std::int64_t package_prbs, SubchannelMode mode);

std::int64_t subchannels_per_slot(const Numerology& num, std::int64_t package_prbs);

/// One resource per vehicle per RRI.
std::int64_t max_vehicles(std::int64_t rri_ms, const Numerology& num, std::int64_t package_prbs);

/// 1 - ledger_capacity / baseline_capacity.
double overhead_fraction(std::int64_t ledger_capacity, std::int64_t baseline_capacity);

/// Every intermediate of the dimensioning pipeline for one payload. The
/// sub-channel figures are empty for an empty payload.
struct CapacityReport {
  std::int64_t re_per_prb = 0;
  std::int64_t res_per_package = 0;
  std::int64_t prbs_per_package = 0;
  std::int64_t prbs_per_slot = 0;
  std::optional<std::int64_t> subchannel_prbs;
  std::optional<std::int64_t> subchannels_per_slot;
  std::optional<std::int64_t> max_vehicles;
};

CapacityReport capacity_report(std::int64_t payload_bytes, const McsEntry& mcs, const PhyConfig& cfg,
                               const Numerology& num, std::int64_t rri_ms);

}  // namespace v2xledger::phy
