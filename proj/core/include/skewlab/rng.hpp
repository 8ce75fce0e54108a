#pragma once

#include <cstdint>

namespace skewlab {

// Counter-based generator: output depends only on (seed, counter), so
// sample ranges can be sharded deterministically.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() { return mix(seed_, counter_++); }

    // Uniform in [0, n) without modulo bias (rejection on the tail).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    double next_unit() {  // [0,1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        // splitmix64 over seed ^ golden-ratio-spaced counter
        std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace skewlab
