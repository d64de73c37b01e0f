#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cryptoscan {

// splitmix64; used to derive independent per-item streams from (seed, index)
// so results do not depend on scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index + 0x517cc1b727220a95ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(seed, index));
}

// Poisson sampling by inversion. std::poisson_distribution output is
// implementation-defined; this keeps generated corpora stable across stdlibs.
inline int sample_poisson(std::mt19937_64& rng, double lambda) {
    if (lambda <= 0.0) return 0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    if (lambda < 30.0) {
        double u = uni(rng);
        double p = std::exp(-lambda);
        double cdf = p;
        int k = 0;
        while (u > cdf && k < 10000) {
            ++k;
            p *= lambda / k;
            cdf += p;
        }
        return k;
    }
    // split large lambda into halves to avoid underflow of exp(-lambda)
    return sample_poisson(rng, lambda / 2.0) + sample_poisson(rng, lambda - lambda / 2.0);
}

} // namespace cryptoscan
