#pragma once
// Deterministic random streams: xoshiro256++ seeded through the splitmix64
// finalizer ("riskab-rng-v1"). Streams are derived, never split implicitly:
// each episode seed comes from derive_stream(base_seed, rep), and within an
// episode the input, noise, and agent substreams are derived from the episode
// seed with fixed tags. Swapping the agent therefore cannot perturb the input
// sequence, and results are bit-reproducible across platforms and thread
// counts. Gaussian and exponential draws are generated here rather than with
// std::*_distribution, whose output is implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace riskab {

inline constexpr const char* kRngAlgorithm = "riskab-rng-v1 (splitmix64 + xoshiro256++)";

// Substream tags within an episode.
inline constexpr std::uint64_t kInputStream = 0;
inline constexpr std::uint64_t kNoiseStream = 1;
inline constexpr std::uint64_t kAgentStream = 2;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t derive_stream(std::uint64_t base, std::uint64_t tag) {
    return mix64(base ^ (0x9E3779B97F4A7C15ull * (tag + 1)));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ull;
            word = mix64(sm);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit mantissa.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe under log().
    double uniform01_open() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller (one value per call, no cached pair).
    double gaussian() {
        double u1 = uniform01_open();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Mean-1 exponential by inversion.
    double exponential() { return -std::log(uniform01_open()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace riskab
