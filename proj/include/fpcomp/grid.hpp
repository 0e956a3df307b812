#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fpcomp {

using LatticePoint = std::vector<std::int64_t>;

// Axis-aligned integer box, inclusive on both ends, with row-major indexing
// (axis 0 fastest). All lattice searches are restricted to such a box.
struct IntBox {
    std::vector<std::int64_t> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    std::int64_t extent(int axis) const { return hi[axis] - lo[axis] + 1; }
    std::int64_t size() const;
    bool contains(std::span<const std::int64_t> p) const;
    std::int64_t index_of(std::span<const std::int64_t> p) const;
    void point_of(std::int64_t index, std::span<std::int64_t> out) const;

    // smallest distance from p to the box boundary, in the max metric
    std::int64_t boundary_distance(std::span<const std::int64_t> p) const;

    static IntBox cube(int dim, std::int64_t lo, std::int64_t hi);
    // bounding box of points, inflated by pad on every side
    static IntBox hull(std::span<const LatticePoint> points, std::int64_t pad);

    // throws std::invalid_argument when empty or dimensions mismatch
    void validate() const;
};

// Componentwise nearest integer; exact halves round toward +infinity, so
// x always lies in psi(x) + [-1/2, 1/2]^d.
LatticePoint psi_round(std::span<const double> x);

}  // namespace fpcomp
