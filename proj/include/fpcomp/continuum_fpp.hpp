#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fpcomp/event_graph.hpp"
#include "fpcomp/lattice_fpp.hpp"

namespace fpcomp {

// Union of equal-radius balls (the growth seeds; radius 1 in the model).
struct SourceRegion {
    std::vector<std::vector<double>> centers;
    double radius = 1.0;

    bool contains(std::span<const double> y) const;
};

struct PointTime {
    double time = kInfiniteTime;
    bool truncated = false;  // no finite chain inside the simulated window
};

// Chain passage times from a source region over the event graph: leaving an
// event costs its delay, so the time to cover y is the best chain cost plus
// the final event's delay. Points inside the source region cost 0.
class ContinuumTimes {
public:
    ContinuumTimes(const EventGraphIndex& index, SourceRegion source);

    PointTime at(std::span<const double> y) const;

    // T(source, center + B_radius): sup of point times over a deterministic
    // mesh of the ball (pitch-spaced offsets, the center itself, and every
    // event center inside the ball)
    PointTime ball_time(std::span<const double> center, double radius, double pitch) const;

    // chain cost accumulated before event i bursts (+inf if never infected)
    double event_entry_time(std::int64_t i) const { return dist_[i]; }

    const SourceRegion& source() const { return source_; }

private:
    const EventGraphIndex* index_;
    SourceRegion source_;
    std::vector<double> dist_;
};

ContinuumTimes continuum_passage_time(const EventGraphIndex& index, const SourceRegion& source);

// Evaluation grid: points origin + pitch * index over an index box.
struct RealGrid {
    std::vector<double> origin;
    double pitch = 1.0;
    IntBox index_box;

    std::vector<double> point_at(std::span<const std::int64_t> idx) const;
    // grid covering [region.lo, region.hi] with the given pitch
    static RealGrid cover(const RealBox& region, double pitch);
};

struct ContinuumTerritories {
    RealGrid grid;
    TerritoryMap map;  // map.box == grid.index_box; winner/time per grid point
};

// Multi-seed competition over one shared event set; seed balls must be
// pairwise disjoint and intersect the box. Labels use exact tie semantics.
ContinuumTerritories continuum_territories(const EventGraphIndex& index,
                                           const std::vector<std::vector<double>>& seed_centers,
                                           const RealGrid& grid, double seed_radius = 1.0);

struct BallGap {
    double point_time = 0.0;  // T(x + B, y)
    double ball_time = 0.0;   // T(x + B, y + B), mesh sup
    double gap = 0.0;
    bool truncated = false;
    double mesh_pitch = 0.0;
};

// Lemma-style comparison of covering a point versus covering the unit ball
// around it; the first inequality (point <= ball) holds by construction on
// every realization because the mesh contains the center.
BallGap ball_vs_point_gap(const EventGraphIndex& index, std::span<const double> x,
                          std::span<const double> y, double mesh_pitch = 0.1);

}  // namespace fpcomp
