#pragma once

#include <cstdint>

namespace ppr {

// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Small counter-free PRNG (splitmix64 stream). One instance per logical
// stream; streams are derived from (seed, a, b) keys so that work items can
// be processed in any order, on any number of threads, with identical
// results.
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n), unbiased (Lemire's multiply-shift with rejection).
    std::uint32_t below(std::uint32_t n) {
        std::uint32_t x = static_cast<std::uint32_t>(next() >> 32);
        std::uint64_t m = static_cast<std::uint64_t>(x) * n;
        std::uint32_t lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            std::uint32_t threshold = (0u - n) % n;
            while (lo < threshold) {
                x = static_cast<std::uint32_t>(next() >> 32);
                m = static_cast<std::uint64_t>(x) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

private:
    std::uint64_t state_;
};

// Derives the state of an independent stream from a seed and two stream
// coordinates (e.g. source vertex and walk number).
constexpr std::uint64_t stream_state(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
    h = mix64(h ^ (a + 0xD1B54A32D192ED03ull));
    h = mix64(h ^ (b + 0x8CB92BA72F3D8DD7ull));
    return h;
}

} // namespace ppr
