#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fpcomp/norm.hpp"

namespace fpcomp {

// Strict Voronoi cell membership: z belongs to cell i iff it is strictly
// N-closer to site i than to every other site. Points on a bisector belong
// to no cell. Indices are 0-based.
bool voronoi_member(std::span<const double> z, std::size_t i, const SiteConfiguration& cfg,
                    const Norm& n);

// Shrunken cell: N(z - x_i) < N(z - x_j) - delta for all j != i.
// delta = 0 coincides with voronoi_member; delta may be negative.
bool voronoi_delta_member(std::span<const double> z, std::size_t i, const SiteConfiguration& cfg,
                          const Norm& n, double delta);

// Union of rays {lambda * S * u : lambda >= 1} over a finite base direction
// set, translated to an apex. Base points all sit on the sphere of radius S.
struct Cone {
    std::vector<std::vector<double>> base_directions;  // unit vectors
    double radius = 1.0;                               // S > 0
    std::vector<double> apex;

    // throws on empty base, non-unit directions, or S <= 0
    void validate() const;
};

// angular_tol ~ 1e-9 gives the exact-ray variant; degrees-scale tolerances
// make the cone measurable for density work.
bool cone_member(std::span<const double> z, const Cone& c, double angular_tol = 1e-9);

using SetPredicate = std::function<bool(std::span<const double>)>;

struct StabilityViolation {
    std::vector<double> z;
    double lambda = 1.0;
};

struct StabilityReport {
    std::vector<StabilityViolation> violations;
    std::int64_t tested = 0;    // accepted samples actually checked
    std::int64_t attempts = 0;  // rejection-sampling attempts
};

// Samples z with predicate(z) true inside the ball
// (sample_center, sample_radius), picks lambda in [1, lambda_max], and checks
// predicate(center + lambda (z - center)). Stable sets return no violations.
StabilityReport homothety_stability_check(const SetPredicate& predicate,
                                          std::span<const double> center,
                                          std::span<const double> sample_center,
                                          double sample_radius, std::int64_t trials,
                                          std::uint64_t seed, double lambda_max = 4.0);

// Samples z in V_1^delta(0, x) and checks z - x stays in the cell.
StabilityReport translate_stability_check(std::span<const double> x, double delta, const Norm& n,
                                          std::int64_t trials, std::uint64_t seed,
                                          double sample_radius = 0.0);

// Same sampling scheme against an arbitrary membership predicate (used for
// negative controls where the predicate is not a Voronoi cell).
StabilityReport translate_stability_check(const SetPredicate& member, std::span<const double> x,
                                          std::int64_t trials, std::uint64_t seed,
                                          double sample_radius);

// Segment minimum of N between two sites (ternary search on a convex map).
struct SegmentWitness {
    std::size_t i = 0, j = 0;
    double t_min = 0.0;               // argmin in [0,1]
    double n_min = 0.0;               // min of N on the segment
    std::vector<double> z_min;        // the minimizing point
    bool pass = false;                // n_min < 1 - margin
};

struct CoexistenceGeometry {
    bool all_pass = false;
    std::vector<SegmentWitness> pairs;   // one entry per unordered pair i < j
    std::vector<bool> site_pass;         // per site: all its segments pass
};

// Requires all sites on the N-unit sphere (within sphere_tol). Verdict uses
// strict inequality with a margin so flat unit-sphere faces do not pass.
CoexistenceGeometry coexistence_geometry_check(const SiteConfiguration& cfg, const Norm& n,
                                               double sphere_tol = 1e-6,
                                               double t_tol = 1e-10, double margin = 1e-9);

}  // namespace fpcomp
