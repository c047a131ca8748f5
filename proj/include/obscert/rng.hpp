#pragma once

#include <cstdint>
#include <random>

namespace obscert {

// splitmix64, used to derive independent substreams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic per-stream generator: substream(seed, id) depends only on
// (seed, id), so sample loops parallelize without sharing RNG state.
inline std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed;
    (void)splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (stream_id + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace obscert
