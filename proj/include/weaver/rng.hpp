#pragma once

#include <cstdint>
#include <random>

namespace weaver {

/// Version of the byte-level stream recipe below. Bump on any change to the
/// substream derivation, the engine, or the draw mappings.
inline constexpr int kStreamRecipeVersion = 1;

/// Replication engine. std::mt19937_64's output sequence (including its
/// single-value seeding) is pinned by the standard, so reports reproduce
/// across compilers and platforms.
using Engine = std::mt19937_64;

/// Substream seed i of a master seed is the i-th output of SplitMix64 seeded
/// at the master value: state = master + (i+1) * 0x9E3779B97F4A7C15, followed
/// by the SplitMix64 output mix.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline Engine replication_stream(std::uint64_t master_seed, std::uint64_t replication) {
    return Engine(substream_seed(master_seed, replication));
}

/// Uniform in [0, 1): top 53 bits of one engine word. The std:: distribution
/// adapters are not bit-specified, so every draw mapping is spelled out here.
inline double u01(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(double p, Engine& g) { return u01(g) < p; }

} // namespace weaver
