#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace quatmark {

/// splitmix64 finalizer: a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Advances a splitmix64 state and returns the next output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9E3779B97F4A7C15ULL;
  return mix64(state);
}

/// xorshift64* generator seeded through splitmix64 (never a zero state).
/// The sequence is fully determined by the seed on every platform.
class XorShiftStar {
 public:
  explicit XorShiftStar(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  /// Unbiased integer on [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// Stateless uniform [0, 1) value for (seed, index); lets per-pixel noise be
/// generated in any order or in parallel with identical results.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
  return static_cast<double>(mix64(mix64(seed) ^ (index * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL)) >> 11) *
         0x1.0p-53;
}

/// Fisher-Yates shuffle of an index permutation.
void shuffle(std::span<std::size_t> items, XorShiftStar& rng) noexcept;

}  // namespace quatmark
