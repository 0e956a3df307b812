#pragma once

#include <cstdint>

#include "fpcomp/edge_weights.hpp"
#include "fpcomp/outbursts.hpp"

namespace fpcomp {

// The two growth models, bundled with the simulation-window policy used by
// estimation and experiment drivers. Passage-time queries in a finite box
// are exact for in-box paths; drivers keep measured points away from the
// boundary by the guard factor times the relevant spacing.
struct LatticeModel {
    int dim = 2;
    EdgeWeightDistribution weights = EdgeWeightDistribution::exponential(1.0);
    double guard_factor = 0.5;

    PassageTimeField field_for(const IntBox& box, std::uint64_t seed) const {
        return PassageTimeField(dim, weights, seed, box);
    }
};

struct ContinuumModel {
    int dim = 2;
    RadiusLaw law = RadiusLaw::constant(1.0);
    double t_cap = 50.0;
    double r_cap = 0.0;       // 0 = law default (1 - 1e-6 quantile)
    double mesh_pitch = 0.1;  // ball-target mesh pitch
    double pad = 6.0;         // box inflation around sources and targets

    OutburstEventSet events_for(const RealBox& box, std::uint64_t seed) const {
        return simulate_outbursts(box, t_cap, law, seed, r_cap);
    }
};

}  // namespace fpcomp
