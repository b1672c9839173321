#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ewens {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Combine stream-identifying parts (master seed, statistic hash, scale bits,
// replicate index, lane) into one Philox key.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::uint64_t p : parts) h = mix64(h + 0x9E3779B97F4A7C15ull + p);
    return h;
}

// Philox2x64-10 counter-based generator (Salmon et al., SC 2011).
// One key per logical stream; the 128-bit counter gives each stream 2^128
// independent draws. Passes the usual test batteries (BigCrush et al.).
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        if (have_ == 0) {
            block();
            have_ = 2;
        }
        return out_[--have_];
    }

    // uniform on [0,1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on the open interval (0,1); used wherever a log or power of the
    // draw must stay finite
    double uniform_oo() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform_oo()) / rate; }

    // Beta(theta,1) by inverse CDF: U = V^(1/theta)
    double beta_theta_one(double theta) {
        double v = uniform_oo();
        return theta == 1.0 ? v : std::pow(v, 1.0 / theta);
    }

    // standard normal, Box-Muller (used only for synthetic test data)
    double normal() {
        double u1 = uniform_oo();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }
    result_type operator()() { return next_u64(); }

private:
    void block() {
        std::uint64_t x0 = ctr_lo_, x1 = ctr_hi_, k = key_;
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t m = 0xD2B74407B1CE6E93ull;
            __uint128_t prod = static_cast<__uint128_t>(m) * x0;
            std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += 0x9E3779B97F4A7C15ull;
        }
        out_[0] = x0;
        out_[1] = x1;
        if (++ctr_lo_ == 0) ++ctr_hi_;
    }

    std::uint64_t key_;
    std::uint64_t ctr_lo_ = 0, ctr_hi_ = 0;
    std::uint64_t out_[2] = {0, 0};
    int have_ = 0;
};

} // namespace ewens
