#pragma once

#include <cstdint>

namespace texinv {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Keyed SplitMix64 stream. Stream `k` of seed `s` starts from
/// mix64(s) ^ mix64(k ^ kGolden) and yields mix64(state += kGolden).
///
/// Streams are independent of each other, so any iteration of a sequence can
/// be regenerated without replaying the draws of earlier ones. Doubles use
/// the top 53 bits; this layout is part of the dataset contract.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) : state_(mix64(seed) ^ mix64(stream ^ kGolden)) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    int v = lo + static_cast<int>(uniform01() * span);
    return v > hi ? hi : v;
  }

  int bit() { return static_cast<int>(next() >> 63); }

 private:
  std::uint64_t state_;
};

}  // namespace texinv
