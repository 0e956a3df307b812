#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fpcomp {

// Law of outburst radii. Support is contained in (0, infinity) and every
// kind has an exponential moment.
struct RadiusLaw {
    enum class Kind { constant, exponential, truncated_exponential };
    Kind kind = Kind::constant;
    double value = 1.0;  // constant
    double rate = 1.0;   // exponential / truncated
    double cap = 1.0;    // truncated: conditioned on (0, cap]

    static RadiusLaw constant(double r);
    static RadiusLaw exponential(double rate);
    static RadiusLaw truncated_exponential(double rate, double cap);

    double quantile(double u) const;
    double cdf(double r) const;
    double mean() const;
    // radius cap at the 1 - mass quantile (constant law: the value itself)
    double default_cap(double mass = 1e-6) const;

    void validate() const;
    std::string describe() const;
};

// Axis-aligned real box.
struct RealBox {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const;
    bool contains(std::span<const double> p) const;
    // Euclidean distance from p to the box (0 when inside)
    double distance(std::span<const double> p) const;
    void validate() const;

    static RealBox cube(int dim, double lo, double hi);
};

// Realized Poisson outburst events (center, delay, radius) on
// box x [0, t_cap], radii thinned at r_cap with the removed mass recorded.
// Deterministic in the seed. Delays are quantized to the 2^-26 time grid.
struct OutburstEventSet {
    RealBox box;
    double t_cap = 0.0;
    double r_cap = 0.0;
    std::uint64_t seed = 0;
    std::int64_t dropped_by_radius = 0;
    double truncated_mass = 0.0;  // nu((r_cap, inf))

    int dim = 2;
    std::vector<double> centers;  // count * dim, row per event
    std::vector<double> delays;
    std::vector<double> radii;

    std::int64_t count() const { return static_cast<std::int64_t>(delays.size()); }
    std::span<const double> center(std::int64_t i) const {
        return {centers.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

OutburstEventSet simulate_outbursts(const RealBox& box, double t_cap, const RadiusLaw& law,
                                    std::uint64_t seed, double r_cap = 0.0 /* 0 = default */);

// Binary format (little-endian): magic "FPOB", version u32, d u32, count
// i64, seed u64, t_cap f64, r_cap f64, truncated_mass f64, box lo/hi f64
// each, then per event d+2 doubles (center, delay, radius).
void write_events_binary(const std::filesystem::path& path, const OutburstEventSet& events);
OutburstEventSet read_events_binary(const std::filesystem::path& path);
void write_events_csv(std::ostream& os, const OutburstEventSet& events);

}  // namespace fpcomp
