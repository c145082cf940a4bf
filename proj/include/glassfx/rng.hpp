#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "glassfx/numeric.hpp"

namespace glassfx {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Engine seed for logical stream `k` of a run seeded with `seed`: the
/// SplitMix64 output sequence with the canonical gamma. Stream k always
/// sees the same seed no matter how many streams run or on how many
/// threads, which is what makes ensembles reproducible and schedulable.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k) {
    return mix64(seed + (k + 1) * 0x9E3779B97F4A7C15ULL);
}

/// mt19937_64 with explicit samplers. The standard pins the engine output
/// exactly; std::*_distribution does not, so the transforms live here and
/// a given seed produces the same draw sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// uniform in [0, 1)
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// uniform in (0, 1]
    double uniform_pos() { return double((eng_() >> 11) + 1) * 0x1.0p-53; }

    /// standard normal, Box-Muller cosine branch (two uniforms per draw)
    double gauss() {
        const double u = uniform_pos();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * pi * v);
    }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

private:
    std::mt19937_64 eng_;
};

} // namespace glassfx
