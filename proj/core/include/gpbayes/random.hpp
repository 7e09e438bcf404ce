#pragma once

#include <cstdint>
#include <random>

namespace gpbayes {

using Rng = std::mt19937_64;

/// One step of the SplitMix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seeds a Mersenne Twister from a 64-bit seed by expanding it through SplitMix64,
/// so nearby seeds give unrelated streams.
Rng make_rng(std::uint64_t seed);

/// Seed of the i-th independent stream derived from a master seed.
///
/// Stream i uses master + i * 0x9E3779B97F4A7C15 (mod 2^64). The increment is odd,
/// so distinct i < 2^64 never collide, and make_rng decorrelates the results.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace gpbayes
