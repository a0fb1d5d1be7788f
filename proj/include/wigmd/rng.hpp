#pragma once

#include <cmath>
#include <cstdint>

// Self-contained counter-seedable RNG. std::random distributions are
// implementation-defined, which would tie results to a libstdc++ version;
// everything here is pinned arithmetic so a (seed, trajectory index) pair
// fully determines the stream on any build.

namespace wigmd::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derive an independent substream seed from (master, index) pairs.
// Used for per-trajectory streams and named sub-purposes (pool, lyapunov, ...).
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0xD1B54A32D192ED03ull * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

class Engine {
public:
    explicit Engine(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        have_gauss_ = false;
    }

    // xoshiro256**
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        return std::uint64_t(uniform() * double(n)) % n;
    }

    // standard normal, Box-Muller (trig form; no rejection, fixed consumption)
    double gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool have_gauss_;
};

} // namespace wigmd::rng
