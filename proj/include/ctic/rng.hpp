#pragma once

#include <cstdint>

namespace ctic {

// All randomness in the library flows through the two primitives below so
// that every result is bit-reproducible from a single integer seed,
// independent of platform, thread count, and iteration order.
//
// splitmix64 is the finalizer of Steele, Lea & Burtt's SplitMix generator;
// mix_seed(seed, index) is the counter-based split used to derive child
// seeds (per run, per cell, per edge) from a master seed.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derive the `index`-th child seed of `seed`.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ (kGolden * (index + 1)));
}

/// Minimal counter-based generator over the splitmix64 finalizer.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n) {
        // Lemire's multiply-shift; the slight modulo bias of the plain
        // multiply is < 2^-64 * n and irrelevant at our population sizes.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

} // namespace ctic
