#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace fpcomp {

// splitmix64 finalizer. All randomness in the project is derived from this
// mixer so that results are identical across platforms and across access
// order (counter-based, no sequential stream state is required for fields).
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Key derivation: fold a word into a running hash.
constexpr std::uint64_t hash_u64(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL));
}

constexpr std::uint64_t hash_i64(std::uint64_t h, std::int64_t v) {
    return hash_u64(h, static_cast<std::uint64_t>(v));
}

// Uniform in [0, 1) with 53 random bits.
constexpr double u01_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential generator for sampling loops; output depends only on the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    double next_u01() { return u01_from_bits(next_u64()); }

    // Uniform in [a, b).
    double next_uniform(double a, double b) { return a + (b - a) * next_u01(); }

    double next_exponential(double rate) { return -std::log1p(-next_u01()) / rate; }

    // Standard normal via Box-Muller (portable, unlike std::normal_distribution).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_u01();
        double u2 = next_u01();
        // avoid log(0)
        while (u1 <= 0.0) u1 = next_u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform direction on the Euclidean unit sphere in R^d.
    void next_unit_vector(std::span<double> out) {
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (double& c : out) {
                c = next_normal();
                n2 += c * c;
            }
        } while (n2 == 0.0);
        const double inv = 1.0 / std::sqrt(n2);
        for (double& c : out) c *= inv;
    }

    // Uniform point in the closed Euclidean ball of given radius.
    void next_in_ball(double radius, std::span<double> out) {
        next_unit_vector(out);
        const double d = static_cast<double>(out.size());
        const double r = radius * std::pow(next_u01(), 1.0 / d);
        for (double& c : out) c *= r;
    }

    // Poisson count by summing unit exponentials; O(mean), fine for our sizes.
    std::int64_t next_poisson(double mean) {
        std::int64_t n = 0;
        double acc = 0.0;
        while (true) {
            acc += next_exponential(1.0);
            if (acc > mean) return n;
            ++n;
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Passage times and delays are snapped to this grid so that every path sum
// of interest is exact in double arithmetic: all addends are multiples of
// 2^-26 and totals stay far below 2^27, so no addition ever rounds. This is
// what makes the zero-tolerance triangle/symmetry checks meaningful.
constexpr double kTimeQuantum = 0x1.0p-26;

inline double quantize_time(double t) {
    return std::round(t * 67108864.0) * kTimeQuantum;  // 2^26
}

}  // namespace fpcomp
