// Counter-based 64-bit random generator (splitmix64). Bit-reproducible
// across platforms for a given seed; the stream is a pure function of
// (seed, counter).

#pragma once

#include <cstdint>
#include <string>

namespace openkpz {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1); never returns 0 so -log() is safe.
  double next_uniform() {
    std::uint64_t bits = next_u64() >> 11;  // 53 bits
    double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    return u;
  }

  static std::string name() { return "splitmix64"; }

 private:
  std::uint64_t state_;
};

}  // namespace openkpz
