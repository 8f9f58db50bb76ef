#pragma once

#include <array>
#include <cstdint>

namespace polyurn {

/// SplitMix64 finalizer; a 64-bit bijective mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

/// Weyl-sequence SplitMix64, used only to expand seeds into generator state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += UINT64_C(0x9E3779B97F4A7C15);
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** stream. Substream derivation for replication r of a run with
/// seed s: the four state words are the first four outputs of SplitMix64
/// seeded with mix64(s ^ mix64(r * 0x9E3779B97F4A7C15 + 1)). Distinct
/// replications therefore get independently hashed starting states, and the
/// same (seed, rep) pair always yields the same stream regardless of how
/// replications are scheduled across workers.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t rep) {
        SplitMix64 sm(mix64(seed ^ mix64(rep * UINT64_C(0x9E3779B97F4A7C15) + 1)));
        bool all_zero = true;
        for (auto& word : state_) {
            word = sm.next();
            all_zero = all_zero && word == 0;
        }
        if (all_zero) state_[0] = UINT64_C(0x853C49E6748FEA9B);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace polyurn
