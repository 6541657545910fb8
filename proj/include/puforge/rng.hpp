#ifndef PUFORGE_RNG_HPP
#define PUFORGE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace puforge {

// splitmix64 (Steele/Lea/Vigna reference constants). Used to expand seeds
// and to derive child seeds; one step per call.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed chaining: state' = splitmix64(state ^ component). All stochastic
// stages derive their seed as derive_seed(master, stage, index, ...), so any
// piece of a run can be reproduced standalone.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t component) {
    std::uint64_t s = seed ^ component;
    return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t c1, std::uint64_t c2) {
    return derive_seed(derive_seed(seed, c1), c2);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t c1, std::uint64_t c2,
                                 std::uint64_t c3) {
    return derive_seed(derive_seed(seed, c1, c2), c3);
}

// xoshiro256** 1.0 (Blackman/Vigna), seeded through splitmix64. Chosen over
// std::mt19937_64 because the standard does not pin down the distribution
// adaptors; with hand-rolled draws below, every stream is bit-reproducible
// across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
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

    // Uniform in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased (rejection on the top range).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller; pairs are consumed in order so the
    // stream stays reproducible.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stage tags for derive_seed chains. Values are part of the reproducibility
// contract; do not renumber.
enum class SeedStage : std::uint64_t {
    DataGen = 1,
    Split = 2,
    Contaminate = 3,
    Folds = 4,
    Search = 5,
    FinalTrain = 6,
    Member = 7,
    Study = 8,
    Repetition = 9,
    Sweep = 10,
};

inline std::uint64_t derive_seed(std::uint64_t seed, SeedStage stage) {
    return derive_seed(seed, static_cast<std::uint64_t>(stage));
}

inline std::uint64_t derive_seed(std::uint64_t seed, SeedStage stage, std::uint64_t index) {
    return derive_seed(seed, static_cast<std::uint64_t>(stage), index);
}

} // namespace puforge

#endif
