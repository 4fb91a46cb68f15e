#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace nctmc::rng {

/// Generator family recorded in batch manifests. Fixed so emitted data is
/// reproducible from (seed, config) alone.
inline constexpr const char* kGeneratorFamily = "xoshiro256** seeded via splitmix64";

/// splitmix64: seed expander and stream splitter.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256**, state filled from splitmix64(seed).
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); the zero draw (probability 2^-53) is redrawn so
  /// log(1/u) stays finite.
  double uniform_open01() {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return u;
  }

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Deterministic per-stream seed derivation for batch work: every stream
/// index maps to an independent generator regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
  SplitMix64 sm(base_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return sm.next();
}

}  // namespace nctmc::rng
