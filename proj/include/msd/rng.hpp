#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace msd {

/// Seeded, splittable PRNG used for every stochastic routine in the library.
///
/// Core generator is xoshiro256++ with splitmix64 seeding. Substreams are
/// derived from the original seed and a stream id, never from generator
/// state, so per-trial streams are reproducible regardless of how much
/// randomness the parent consumed. All output is bit-stable for a fixed
/// seed across platforms with IEEE-754 doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = split_mix64(s);
    }

    /// Independent substream keyed by (original seed, stream id).
    Rng derive(std::uint64_t stream) const { return Rng(mix(seed_, stream)); }

    /// Stateless seed combiner for building seed trees.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        return split_mix64(s);
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

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached so consecutive
    /// draws cost one transcendental batch per two values.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t split_mix64(std::uint64_t& s) {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace msd
