#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpcomp/parallel.hpp"
#include "fpcomp/voronoi.hpp"

namespace fpcomp {

// Relative-density estimator configuration. The grid estimator counts cell
// centers of a fixed-pitch lattice; the Monte Carlo estimator samples
// uniformly in each ball with a fixed shard layout so results do not depend
// on the worker count.
struct DensityEstimatorConfig {
    enum class Mode { grid, monte_carlo };
    Mode mode = Mode::monte_carlo;
    double pitch = 0.1;              // grid mode
    std::int64_t samples = 100000;   // monte carlo mode, per radius
    std::uint64_t seed = 1;
    double tail_window = 0.25;       // fraction of radii used for lower/upper estimates
    Exec exec = Exec::openmp;
};

struct DensityRow {
    double radius = 0.0;
    double ratio = 0.0;       // |C ∩ D ∩ B_R| / |D ∩ B_R|
    double stderr_ = 0.0;     // 0 for grid mode
    std::int64_t samples = 0;       // points tested in B_R
    std::int64_t d_hits = 0;        // points in D
    std::int64_t cd_hits = 0;       // points in C ∩ D
    bool defined = true;            // false when no mass of D was found
};

struct DensityReport {
    std::vector<DensityRow> rows;
    double lower_estimate = 0.0;  // min ratio over the tail window
    double upper_estimate = 0.0;  // max ratio over the tail window
    std::string estimator;        // "grid" or "monte-carlo"
    double pitch = 0.0;
    std::int64_t tail_rows = 0;

    void write_csv(std::ostream& os) const;  // radius, ratio, stderr, samples
    std::string to_json_string() const;
};

// Density of C relative to D over the listed ball radii (balls centered at
// the origin). Radii must be strictly increasing. Throws when D has no mass
// in the largest ball.
DensityReport relative_density(const SetPredicate& c, const SetPredicate& d, int dim,
                               const std::vector<double>& radii,
                               const DensityEstimatorConfig& cfg);

}  // namespace fpcomp
