#pragma once

#include <cstdint>
#include <vector>

namespace copyspace {

/// SplitMix64 finalizer. Used both as the stream function of the generator
/// below and as the hash in per-sample seed derivation.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// SplitMix64: fixed-width 64-bit generator with platform-independent output.
/// The platform default engines are never used anywhere in this project;
/// every sampled value goes through this type so corpora reproduce bit-exactly
/// across toolchains.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], inclusive. Plain modulo reduction: the
    /// bias is below 2^-32 for the ranges used here and the result is
    /// identical on every platform.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(next() % span);
    }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    /// Index into a non-empty container of the given size.
    size_t index(size_t size) { return static_cast<size_t>(uniform_int(0, static_cast<int64_t>(size) - 1)); }

private:
    uint64_t state_;
};

/// Documented splittable seed scheme: the per-sample seed for (class, index)
/// is `dataset_seed XOR mix64(class << 32 | index)`. Samples can therefore be
/// regenerated individually and in any order.
inline uint64_t derive_sample_seed(uint64_t dataset_seed, int complexity_class, uint64_t index) {
    return dataset_seed ^ mix64((static_cast<uint64_t>(complexity_class) << 32) | index);
}

} // namespace copyspace
