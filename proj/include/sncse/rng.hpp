#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sncse::num {

// SplitMix64 output function. Bit-reproducible on every platform, unlike the
// stdlib distributions, which the standard leaves implementation-defined.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (0x9E3779B97F4A7C15ULL + b * 0xBF58476D1CE4E5B9ULL));
}

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Named substream of the master seed (init, shuffle, dropout, sampling).
inline uint64_t substream(uint64_t seed, std::string_view name) {
    return mix(seed, fnv1a(name));
}

// Stateless element hash used by dropout: the mask value at (seed, index)
// does not depend on how many elements precede it.
inline uint64_t elem_hash(uint64_t seed, uint64_t index) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline double to_unit(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return to_unit(next_u64()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; deterministic, no cached spare.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform integer in [0, n) by rejection-free scaling; n <= 2^32 in practice.
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

private:
    uint64_t state_;
};

}  // namespace sncse::num
