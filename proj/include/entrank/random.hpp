#pragma once

#include <cstdint>
#include <random>

#include "entrank/seqcore.hpp"

namespace entrank {

// std::mt19937_64 output is fully specified by the standard, unlike the
// standard distributions, so sampling is done by hand to keep outputs
// identical across standard library implementations.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform integer in [lo, hi] (inclusive) by rejection sampling.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(rng());  // full 64-bit range
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span + 1) % span;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw > limit);
    return lo + static_cast<std::int64_t>(draw % span);
}

/// Uniform i.i.d. ACGT sequence of the given length.
inline EncodedSequence random_sequence(std::size_t length, Rng& rng) {
    std::vector<Token> tokens(length);
    for (auto& t : tokens) t = static_cast<Token>(rng() >> 62);
    return EncodedSequence(std::move(tokens));
}

}  // namespace entrank
