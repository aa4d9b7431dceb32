#pragma once

#include <cstdint>
#include <random>

namespace coems::sim {

using Rng = std::mt19937_64;

/// Named generator substreams. Each channel of a run draws from its own
/// engine so that, e.g., the out-of-loop noise does not shift when the
/// feedback configuration changes.
enum class Stream : std::uint64_t {
  InitialState = 1,
  InLoopNoise = 2,
  OutOfLoopNoise = 3,
  ThermalForce = 0x100,   // + mode index
  BrownianBridge = 0x200  // + mode index
};

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  const auto id = static_cast<std::uint64_t>(stream) + index;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
  return Rng(seq);
}

/// splitmix64 finaliser, used to derive per-run seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace coems::sim
