// seed_stream.hpp
#pragma once
#include <cstdint>
#include <random>

namespace cbl {

using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based stream derivation: the seed of stream `index` under
// `master` depends on nothing else, so per-trial results do not depend on
// the order or thread in which trials are evaluated.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
    return Rng{derive_stream_seed(master, index)};
}

}  // namespace cbl
