#pragma once

#include <cstdint>
#include <random>

namespace codamort {

// splitmix64 mixer (Vigna). Used to derive independent sub-stream seeds so
// that replicate b of a run is the same whether replicates execute serially
// or in parallel.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `master`. Fixed splitting rule.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream));
}

/// Index in [0, n). Plain modulo on a 64-bit draw: the bias is ~n/2^64 and
/// the result does not depend on the standard library's distribution
/// implementation.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

} // namespace codamort
