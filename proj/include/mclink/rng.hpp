#pragma once

#include <cstdint>

namespace mclink {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used as a counter-based
/// generator: a value depends only on (seed, stream, counter), so a noise
/// sample for a given time slot is the same no matter how the integrator
/// subdivides that slot.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class NoiseStream {
 public:
  constexpr NoiseStream(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

  /// Splits off an independent child stream.
  constexpr NoiseStream split(std::uint64_t child) const { return NoiseStream(key_, child + 1); }

  constexpr std::uint64_t bits(std::uint64_t counter) const { return splitmix64(key_ ^ splitmix64(counter)); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace mclink
