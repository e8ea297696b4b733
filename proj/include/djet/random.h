/*******************************************************************************
 * Counter-based pseudo random numbers (Philox4x32-10).
 *
 * Every random decision in the library is a pure function of a 64 bit seed
 * and a counter, so results do not depend on how many logical PEs exist or in
 * which order they run.
 *
 * @file:   random.h
 ******************************************************************************/
#pragma once

#include <array>
#include <cstdint>

namespace djet {
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53;
  constexpr std::uint32_t kM1 = 0xCD9E8D57;
  constexpr std::uint32_t kW0 = 0x9E3779B9;
  constexpr std::uint32_t kW1 = 0xBB67AE85;

  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

constexpr PhiloxKey philox_key(const std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// 64 random bits for position (stream, index) under the given seed.
constexpr std::uint64_t
random_bits(const std::uint64_t seed, const std::uint64_t stream, const std::uint64_t index) {
  const PhiloxCounter out = philox4x32(
      {static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(stream),
       static_cast<std::uint32_t>(stream >> 32)},
      philox_key(seed)
  );
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// Uniform double in [0, 1) with 53 random bits.
constexpr double
random_unit(const std::uint64_t seed, const std::uint64_t stream, const std::uint64_t index) {
  return static_cast<double>(random_bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

// Sequential stream over one (seed, stream) pair.
class CounterRandom {
public:
  CounterRandom(const std::uint64_t seed, const std::uint64_t stream)
      : _seed(seed),
        _stream(stream) {}

  std::uint64_t next_bits() {
    return random_bits(_seed, _stream, _index++);
  }

  double next_unit() {
    return random_unit(_seed, _stream, _index++);
  }

  // Uniform integer in [0, bound); bound > 0. Uses Lemire's multiply-shift
  // with rejection.
  std::uint64_t next_below(const std::uint64_t bound) {
    while (true) {
      const std::uint64_t x = next_bits();
      const unsigned __int128 product = static_cast<unsigned __int128>(x) * bound;
      const auto low = static_cast<std::uint64_t>(product);
      if (low >= (-bound) % bound) {
        return static_cast<std::uint64_t>(product >> 64);
      }
    }
  }

private:
  std::uint64_t _seed;
  std::uint64_t _stream;
  std::uint64_t _index = 0;
};

// Stream identifiers; keeps unrelated consumers of one seed apart.
namespace streams {
constexpr std::uint64_t kGenerator = 1;
constexpr std::uint64_t kCoarsening = 2;
constexpr std::uint64_t kInitialPartitioning = 3;
constexpr std::uint64_t kRebalanceBase = std::uint64_t{1} << 32;
} // namespace streams
} // namespace djet
