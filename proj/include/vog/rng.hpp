#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace vog {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// xorshift64* generator (Vigna 2014): 64-bit state, shifts 12/25/27,
/// multiplier 0x2545F4914F6CDD1D. The state is seeded through splitmix64 so
/// that seed 0 is valid. uniform() takes the top 53 bits.
///
/// Resolved stimulus schedules depend on this exact sequence.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed))
    {
        if (state_ == 0)
            state_ = 0x9E3779B97F4A7C15ull;
    }

    std::uint64_t next()
    {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Box-Muller, second value cached).
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace vog
