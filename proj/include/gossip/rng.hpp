#pragma once

#include <cstdint>

namespace gossip {

// Counter-based pseudo-random primitives. Every random decision in the library
// is a pure function of a 64-bit key, so sampling is order-independent,
// reproducible across platforms, and safe to fan out over worker threads.

/// SplitMix64 finalizer: bijective avalanche mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combine a seed with one or two tags into a fresh stream key.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag));
}
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(derive_seed(seed, a) ^ mix64(b ^ 0xD1B54A32D192ED03ULL));
}

/// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
constexpr double u01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform [0,1) draw for the unordered slot (i, j) under `seed`.
/// Independent of evaluation order; slot (i, j) and (j, i) share a stream.
inline double edge_u01(std::uint64_t seed, std::uint32_t i, std::uint32_t j) {
    if (i > j) { const auto t = i; i = j; j = t; }
    const std::uint64_t slot = (static_cast<std::uint64_t>(i) << 32) | j;
    return u01(mix64(seed ^ mix64(slot)));
}

/// Sequential splittable stream for per-trial draws (opinions, shuffles).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    double next_u01() { return u01(next()); }

    /// Uniform draw on [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

private:
    std::uint64_t state_;
};

} // namespace gossip
