#pragma once

#include <cstddef>
#include <cstdint>

namespace volterra {

// Standard splitmix64 step; full-period 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based hash of (seed, k, i): stateless, so the same triple yields the
// same value at every call site, on every thread, in every run.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t k, std::uint64_t i) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ k);
    h = splitmix64(h ^ i);
    return h;
}

// Top 53 bits mapped strictly inside (0, 1): the half-step offset keeps both
// endpoints unreachable.
inline double unit_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Small deterministic generator for tests and sampled probes.
struct SplitMixRng {
    std::uint64_t state;

    explicit SplitMixRng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return unit_open(next()); }

    // Uniform in {0, ..., n-1}; n must be positive.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }
};

// FNV-1a over raw bytes; used for stable content fingerprints in manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t j = 0; j < size; ++j) {
        h ^= bytes[j];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace volterra
