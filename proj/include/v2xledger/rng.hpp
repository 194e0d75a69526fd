// Seedable random streams with portable draws.
//
// std::uniform_int_distribution and friends are implementation-defined, so
// the bounded and real-valued draws here are spelled out on top of
// std::mt19937_64, whose output sequence is fixed by the standard.
#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace v2xledger {

/// What a stream is used for. Each purpose gets an independent stream so
/// that draws for one decision never shift the draws of another.
enum class StreamPurpose : std::uint32_t {
  environment = 0,
  selection = 1,
  reselection_counter = 2,
  keep_decision = 3,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream keyed by (seed, vehicle, purpose).
  static Rng stream(std::uint64_t seed, std::uint32_t vehicle_id, StreamPurpose purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), vehicle_id,
                      static_cast<std::uint32_t>(purpose), 0x5eedu};
    return Rng(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // reject the top partial bucket
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform on [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}

  std::mt19937_64 engine_;
};

}  // namespace v2xledger
