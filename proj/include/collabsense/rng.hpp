#pragma once

#include <cstdint>
#include <random>

namespace collabsense {

/// One SplitMix64 output for state x (golden-ratio increment, then the finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` under `master`: mix64(mix64(master) ^ index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ index);
}

using Engine = std::mt19937_64;

/// Uniform draw on the open interval (0,1) from the top 53 bits.
inline double open_uniform(Engine& engine) {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace collabsense
