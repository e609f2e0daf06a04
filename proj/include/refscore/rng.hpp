#pragma once
// Deterministic hashing and substream seeding. All randomized components
// derive their streams from (seed, label, index) tuples so results are
// independent of thread scheduling.

#include <cstdint>
#include <random>
#include <string_view>

namespace refscore::rng {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_str(std::string_view s, uint64_t seed = 0) {
    // FNV-1a folded through splitmix for avalanche.
    uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

inline uint64_t combine(uint64_t a, uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

// Uniform double in [0,1) from a single hash value.
inline double to_unit(uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Engine for a named substream; deterministic in (seed, label, index).
inline std::mt19937_64 substream(uint64_t seed, std::string_view label, uint64_t index) {
    return std::mt19937_64(combine(hash_str(label, seed), index));
}

} // namespace refscore::rng
