#pragma once

#include <cmath>
#include <cstdint>

namespace pamsim {

/// splitmix64 step; also used as the seed-derivation hash so that sweep
/// cell seeds are stable across versions and worker counts.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derive a child seed from (parent, index). Deterministic and documented:
/// seed = splitmix64(parent ^ splitmix64(index + 1)).
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(parent ^ splitmix64(index + 1));
}

/// Small deterministic PRNG (xorshift-star core seeded through splitmix64).
/// Portable across platforms and standard-library versions; the Gaussian
/// draw is an explicit Box-Muller so noise streams are bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        state_ = splitmix64(seed);
        if (state_ == 0) state_ = 0x4D595DF4D0F33173ULL;
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform random bit.
    int bit() { return static_cast<int>(next_u64() >> 63); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_;
};

}  // namespace pamsim
