#pragma once

#include <cstdint>

namespace gaplab {

// Deterministic splitmix64 stream (Steele, Lea, Flood 2014). Scenario
// generation depends on this exact sequence: reports are reproducible
// bit-for-bit across builds as long as the draw order is unchanged.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Plain modulo; the tiny bias is irrelevant for
  // test-scenario generation and keeps the stream easy to re-implement.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace gaplab
