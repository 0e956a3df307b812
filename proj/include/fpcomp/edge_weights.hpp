#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "fpcomp/grid.hpp"

namespace fpcomp {

// Law of the i.i.d. edge passage times. All kinds have nonnegative support
// and finite mean; draws are quantized to the 2^-26 time grid (see rng.hpp).
struct EdgeWeightDistribution {
    enum class Kind { constant, exponential, uniform, atom_mixture };
    Kind kind = Kind::exponential;
    double value = 1.0;      // constant
    double rate = 1.0;       // exponential / atom-mixture tail
    double a = 0.0, b = 1.0; // uniform Unif[a, b), 0 <= a < b
    double atom_p = 0.0;     // atom-mixture: P(tau = 0)

    static EdgeWeightDistribution constant(double c);
    static EdgeWeightDistribution exponential(double rate);
    static EdgeWeightDistribution uniform(double a, double b);
    static EdgeWeightDistribution atom_mixture(double p, double tail_rate);

    double mean() const;
    double quantile(double u) const;  // inverse CDF, before quantization

    // throws on invalid parameters; returns an advisory warning when the
    // atom mass is not below the declared subcritical threshold
    std::optional<std::string> validate(int dim, double atom_threshold) const;

    std::string describe() const;
};

// Deterministic realization of the edge-weight family on Z^d: the weight of
// an edge is a pure function of (master seed, canonical edge key), so lazy
// queries in any order and on any machine agree.
struct PassageTimeField {
    int dim = 2;
    EdgeWeightDistribution dist;
    std::uint64_t seed = 1;
    IntBox box;

    PassageTimeField(int dim, EdgeWeightDistribution dist, std::uint64_t seed, IntBox box);

    // endpoints must be lattice neighbors (throws otherwise)
    double edge_weight(std::span<const std::int64_t> x, std::span<const std::int64_t> y) const;

    // hot path: edge from `lower` to `lower + e_axis`, no validation
    double edge_weight_lower(std::span<const std::int64_t> lower, int axis) const;
};

}  // namespace fpcomp
