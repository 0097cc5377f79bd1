#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace cvstab {

// Deterministic pseudo random generator used everywhere randomness is needed:
// fold shuffles, synthetic samplers, SGD index picks, Monte Carlo replicates.
//
// The core is splitmix64 (Steele, Lea and Flood's SplittableRandom finalizer):
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// It is fully specified here so results are reproducible across platforms and
// standard library versions, unlike the std::<random> distribution adaptors
// which are implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random mantissa bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) via the multiply-high mapping
    // floor(u * bound / 2^64). bound must be nonzero. The mapping has a
    // negligible bias of at most bound / 2^64, acceptable for the bounds
    // used here (all far below 2^32).
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Standard normal via Box-Muller. Consumes exactly two uniforms per call
    // and returns the cosine branch, keeping the stream layout predictable.
    double next_normal() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Derived stream k of a base seed: state = mix(seed + (k+1) * golden),
    // where mix is the splitmix64 output function. Replicate k of a Monte
    // Carlo run gets stream k, so results do not depend on scheduling order.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by the generator above.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace cvstab
