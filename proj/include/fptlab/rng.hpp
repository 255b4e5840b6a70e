#pragma once

// Counter-based random numbers (Philox4x32-10). Every draw is a pure
// function of (seed, path index, stream id, counter), so results do not
// depend on how paths are scheduled across workers.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace fptlab {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Independent substreams of one simulated path.
enum class Stream : std::uint32_t {
  Diffusion = 1,     // grid-step Gaussians of the jump-free OU part
  Jumps = 2,         // inter-arrival times and jump sizes
  BridgePoint = 3,   // OU-bridge Gaussians at jump epochs
  BridgeCross = 4,   // uniforms for the Brownian-bridge crossing test
  CompoundPoisson = 5,
  Synthetic = 6,     // test/calibration draws
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t path, Stream stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        path_hi_(static_cast<std::uint32_t>((path >> 32) & 0x00FFFFFFu) |
                 (static_cast<std::uint32_t>(stream) << 24)) {}

  Philox4x32Counter block(std::uint64_t counter) const {
    return philox4x32_10({static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                          path_lo_, path_hi_},
                         key_);
  }

  /// Two uniforms in the open interval (0, 1) from one block.
  std::pair<double, double> uniform_pair(std::uint64_t counter) const {
    const auto b = block(counter);
    return {to_open_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]),
            to_open_unit((static_cast<std::uint64_t>(b[2]) << 32) | b[3])};
  }

  double uniform(std::uint64_t counter) const { return uniform_pair(counter).first; }

  /// Standard normal number `index`; indices 2k and 2k+1 share one block
  /// through the Box-Muller cos/sin pair.
  double normal(std::uint64_t index) const {
    const auto [u1, u2] = uniform_pair(index >> 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return (index & 1u) ? r * std::sin(theta) : r * std::cos(theta);
  }

  std::pair<double, double> normal_pair(std::uint64_t block_index) const {
    const auto [u1, u2] = uniform_pair(block_index);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  static double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
};

}  // namespace fptlab
