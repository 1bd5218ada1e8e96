#pragma once

#include <cstdint>

// Deterministic random streams keyed by (master_seed, stream_id).
//
// The generator is xoshiro256** with its state filled from a SplitMix64
// sequence over the mixed key, so equal keys reproduce the identical draw
// sequence and distinct stream ids give statistically independent streams.
// Integer and uniform draws are pure 64-bit arithmetic and therefore
// platform-independent. Gaussian draws use the Box-Muller transform (frozen
// choice; each normal consumes exactly two uniforms) and inherit the libm
// rounding of log/cos/sqrt.

namespace mrpeval {

/// Stream id layout used by the CLI and the experiment harness:
/// one stream per (trial, phase) pair.
constexpr std::uint64_t make_stream_id(std::uint64_t trial_index, std::uint64_t phase) {
    return trial_index * 65536u + phase;
}

class RandomSource {
public:
    RandomSource(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id) {
        std::uint64_t key = mix64(master_seed) ^ mix64(stream_id * 0x9E3779B97F4A7C15ull + 1u);
        for (auto& word : state_) {
            key += 0x9E3779B97F4A7C15ull;
            word = mix64(key);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0u) state_[0] = 1u;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5u, 7) * 9u;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw, Box-Muller.
    double next_normal();

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // SplitMix64 finalizer.
    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4] = {};
    std::uint64_t master_seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

} // namespace mrpeval
