// Counter-based deterministic random stream.
//
// Pinned generator contract (all implementations must agree bit-for-bit):
//   z = seed + (counter + 1) * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   mix = z ^ (z >> 31)
//   unit = (mix >> 11) * 2^-53          in [0, 1)
// Draws are keyed by (seed, counter), so evaluation order never matters.
#pragma once

#include <cstdint>
#include <utility>

namespace orlicz::rng {

std::uint64_t mix(std::uint64_t seed, std::uint64_t counter);

double unit(std::uint64_t seed, std::uint64_t counter);

// Independent substream seed for a tagged consumer.
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);

// Standard normal pair via Box-Muller on counters (2c, 2c+1).
std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t counter);

}  // namespace orlicz::rng
