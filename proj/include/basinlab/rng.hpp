#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "basinlab/geometry.hpp"

namespace basinlab {

// splitmix64 finalizer; full-avalanche 64-bit hash.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based random stream. Every output is a pure function of
// (base_seed, stream_index, draw counter), so one stream per trial gives
// results that do not depend on worker count or execution order. Gaussian
// draws use the Box-Muller transform on top of the uniform stream; the exact
// bit pattern therefore depends on the platform's log/cos/sin rounding, which
// makes runs reproducible within a platform and best-effort across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
      : key_(mix64(mix64(base_seed + kGolden) ^ (stream_index + kWeyl))) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Two independent standard normals from one Box-Muller transform.
  std::pair<double, double> next_gaussian_pair() {
    const double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kWeyl = 0xd1b54a32d192ed03ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace basinlab
