// Seedable, platform-independent random numbers.
//
// Generator: xoshiro256** (Blackman and Vigna), state filled from the 64-bit
// seed by four successive splitmix64 outputs.
// Uniforms: the top 53 bits of a draw scaled by 2^-53, giving [0, 1).
// Gaussians: Box-Muller on two uniforms u1, u2 with r = sqrt(-2 log(1 - u1)),
// returning r cos(2 pi u2) and then r sin(2 pi u2) from the same pair.
// These choices are part of the reproducibility contract; do not change them.

#pragma once

#include <array>
#include <cstdint>

namespace sphdiff {

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);
  std::uint64_t next();
  double uniform();

 private:
  std::array<std::uint64_t, 4> s_;
};

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}
  /// Standard normal draw.
  double next();

 private:
  Xoshiro256 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sphdiff
