#pragma once

#include <cstdint>
#include <random>

namespace bsd {

/// Derives an independent engine from a master seed and a path of stream
/// indices, so each (replicate, noise source, block) draws from its own stream.
inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// SplitMix64 finalizer; used to turn (seed, tag) pairs into child seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream tags for the two independent noise sources of an experiment.
inline constexpr std::uint64_t kSignalNoiseStream = 1;
inline constexpr std::uint64_t kOperatorNoiseStream = 2;

}  // namespace bsd
