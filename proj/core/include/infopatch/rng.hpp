#pragma once

#include <cstdint>

namespace infopatch {

/// xorshift64* (Vigna 2014): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
/// The state is initialised from the seed with one splitmix64 step, so every
/// seed (including 0) yields a non-zero state. Output depends only on the seed.
class XorShift64Star {
public:
  explicit XorShift64Star(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  /// Uniform integer in [0, bound) by 64x64 -> 128 multiply-high; bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ typedef unsigned __int128 U128;
    return static_cast<std::uint64_t>((static_cast<U128>(next()) * bound) >> 64);
  }

  static std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

private:
  std::uint64_t state_;
};

}  // namespace infopatch
