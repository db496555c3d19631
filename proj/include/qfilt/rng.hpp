#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qfilt {

// Philox4x32-10 counter-based generator. Every output block is a pure
// function of (key, counter), so independent streams can be addressed by
// (seed, trial, step, channel) without carrying generator state around.
namespace philox {

struct Block {
  std::array<std::uint32_t, 4> x;
};

inline Block generate(std::uint64_t key, std::array<std::uint32_t, 4> ctr) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return Block{ctr};
}

inline std::uint64_t lo64(const Block& b) {
  return static_cast<std::uint64_t>(b.x[0]) |
         (static_cast<std::uint64_t>(b.x[1]) << 32);
}

inline std::uint64_t hi64(const Block& b) {
  return static_cast<std::uint64_t>(b.x[2]) |
         (static_cast<std::uint64_t>(b.x[3]) << 32);
}

// Maps to [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Maps to (0, 1]; safe as a log argument.
inline double to_unit_open(std::uint64_t u) {
  return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace philox

/// Addressable noise source: one Gaussian or uniform variate per
/// (trial, step, channel) slot, reproducible from the seed alone.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Standard normal draw (unit variance; scale by sqrt(dt) for increments).
  double gaussian(std::uint32_t trial, std::uint32_t step,
                  std::uint32_t channel) const {
    const philox::Block b = philox::generate(seed_, {trial, step, channel, 0});
    const double u1 = philox::to_unit_open(philox::lo64(b));
    const double u2 = philox::to_unit(philox::hi64(b));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform draw on [0, 1).
  double uniform(std::uint32_t trial, std::uint32_t step,
                 std::uint32_t channel) const {
    const philox::Block b = philox::generate(seed_, {trial, step, channel, 1});
    return philox::to_unit(philox::lo64(b));
  }

 private:
  std::uint64_t seed_;
};

}  // namespace qfilt
