#include "fpcomp/edge_weights.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fpcomp/rng.hpp"

namespace fpcomp {

EdgeWeightDistribution EdgeWeightDistribution::constant(double c) {
    EdgeWeightDistribution d;
    d.kind = Kind::constant;
    d.value = c;
    return d;
}

EdgeWeightDistribution EdgeWeightDistribution::exponential(double rate) {
    EdgeWeightDistribution d;
    d.kind = Kind::exponential;
    d.rate = rate;
    return d;
}

EdgeWeightDistribution EdgeWeightDistribution::uniform(double a, double b) {
    EdgeWeightDistribution d;
    d.kind = Kind::uniform;
    d.a = a;
    d.b = b;
    return d;
}

EdgeWeightDistribution EdgeWeightDistribution::atom_mixture(double p, double tail_rate) {
    EdgeWeightDistribution d;
    d.kind = Kind::atom_mixture;
    d.atom_p = p;
    d.rate = tail_rate;
    return d;
}

double EdgeWeightDistribution::mean() const {
    switch (kind) {
        case Kind::constant: return value;
        case Kind::exponential: return 1.0 / rate;
        case Kind::uniform: return 0.5 * (a + b);
        case Kind::atom_mixture: return (1.0 - atom_p) / rate;
    }
    return 0.0;
}

double EdgeWeightDistribution::quantile(double u) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::exponential:
            return -std::log1p(-u) / rate;
        case Kind::uniform:
            return a + (b - a) * u;
        case Kind::atom_mixture:
            if (u < atom_p) return 0.0;
            return -std::log1p(-(u - atom_p) / (1.0 - atom_p)) / rate;
    }
    return 0.0;
}

std::optional<std::string> EdgeWeightDistribution::validate(int dim, double atom_threshold) const {
    switch (kind) {
        case Kind::constant:
            if (!(value > 0.0)) throw std::invalid_argument("constant weight must be positive");
            break;
        case Kind::exponential:
            if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
            break;
        case Kind::uniform:
            if (!(0.0 <= a && a < b)) throw std::invalid_argument("uniform needs 0 <= a < b");
            break;
        case Kind::atom_mixture: {
            if (!(rate > 0.0)) throw std::invalid_argument("atom-mixture tail rate must be positive");
            if (!(atom_p >= 0.0 && atom_p < 1.0))
                throw std::invalid_argument("atom-mixture needs 0 <= p < 1");
            if (atom_p >= atom_threshold) {
                std::ostringstream os;
                os << "atom mass P(tau=0) = " << atom_p
                   << " is not below the declared subcritical threshold " << atom_threshold
                   << " for d = " << dim << "; results may be in the critical regime";
                return os.str();
            }
            break;
        }
    }
    return std::nullopt;
}

std::string EdgeWeightDistribution::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::constant: os << "constant(" << value << ")"; break;
        case Kind::exponential: os << "exponential(" << rate << ")"; break;
        case Kind::uniform: os << "uniform(" << a << "," << b << ")"; break;
        case Kind::atom_mixture: os << "atom(" << atom_p << ")+exp(" << rate << ")"; break;
    }
    return os.str();
}

PassageTimeField::PassageTimeField(int dim_, EdgeWeightDistribution dist_, std::uint64_t seed_,
                                   IntBox box_)
    : dim(dim_), dist(std::move(dist_)), seed(seed_), box(std::move(box_)) {
    box.validate();
    if (box.dim() != dim) throw std::invalid_argument("passage time field: box dimension mismatch");
}

double PassageTimeField::edge_weight_lower(std::span<const std::int64_t> lower, int axis) const {
    std::uint64_t h = hash_u64(seed, 0x656467656b657931ULL);
    for (int a = 0; a < dim; ++a) h = hash_i64(h, lower[a]);
    h = hash_u64(h, static_cast<std::uint64_t>(axis));
    return quantize_time(dist.quantile(u01_from_bits(h)));
}

double PassageTimeField::edge_weight(std::span<const std::int64_t> x,
                                     std::span<const std::int64_t> y) const {
    int axis = -1;
    for (int a = 0; a < dim; ++a) {
        const std::int64_t d = y[a] - x[a];
        if (d == 0) continue;
        if ((d != 1 && d != -1) || axis != -1)
            throw std::invalid_argument("edge_weight: endpoints are not lattice neighbors");
        axis = a;
    }
    if (axis == -1) throw std::invalid_argument("edge_weight: endpoints coincide");
    // canonical key: the lexicographically lower endpoint plus the axis
    return y[axis] > x[axis] ? edge_weight_lower(x, axis) : edge_weight_lower(y, axis);
}

}  // namespace fpcomp
