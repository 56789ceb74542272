#pragma once

#include <cstdint>
#include <random>

namespace qwalk {

// Seedable generator with a fixed, documented output sequence.
//
// The engine is std::mt19937_64, whose output is pinned by the C++ standard.
// The std::*_distribution adaptors are not (each standard library picks its own
// algorithm), so the two derived draws below are implemented here:
//   uniform01()        = (x >> 11) * 2^-53, a double in [0, 1)
//   uniform_index(n)   = rejection sampling on the top of the 64-bit range
// Records produced with the same seed are therefore bit-identical across
// platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qwalk
