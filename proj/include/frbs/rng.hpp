#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace frbs {

/// splitmix64 finalizer; used to derive independent sub-seeds from
/// (seed, stream id) pairs so parallel work is schedule-independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * (b + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

/// Deterministic standard normal stream: mt19937_64 + Box-Muller.
/// std::normal_distribution is implementation-defined, so we pin the
/// transform ourselves; the output sequence is part of the versioned
/// behaviour of this library (reports quote the seed).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // uniforms in (0,1]; u1 > 0 keeps log finite
        const double u1 = ((eng_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = (eng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace frbs
