#include "fpcomp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpcomp {

std::int64_t IntBox::size() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim(); ++a) n *= extent(a);
    return n;
}

bool IntBox::contains(std::span<const std::int64_t> p) const {
    for (int a = 0; a < dim(); ++a)
        if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
}

std::int64_t IntBox::index_of(std::span<const std::int64_t> p) const {
    std::int64_t idx = 0;
    std::int64_t stride = 1;
    for (int a = 0; a < dim(); ++a) {
        idx += (p[a] - lo[a]) * stride;
        stride *= extent(a);
    }
    return idx;
}

void IntBox::point_of(std::int64_t index, std::span<std::int64_t> out) const {
    for (int a = 0; a < dim(); ++a) {
        const std::int64_t e = extent(a);
        out[a] = lo[a] + index % e;
        index /= e;
    }
}

std::int64_t IntBox::boundary_distance(std::span<const std::int64_t> p) const {
    std::int64_t d = std::numeric_limits<std::int64_t>::max();
    for (int a = 0; a < dim(); ++a) d = std::min({d, p[a] - lo[a], hi[a] - p[a]});
    return d;
}

IntBox IntBox::cube(int dim, std::int64_t lo, std::int64_t hi) {
    IntBox b;
    b.lo.assign(dim, lo);
    b.hi.assign(dim, hi);
    b.validate();
    return b;
}

IntBox IntBox::hull(std::span<const LatticePoint> points, std::int64_t pad) {
    if (points.empty()) throw std::invalid_argument("IntBox::hull: no points");
    IntBox b;
    b.lo = points[0];
    b.hi = points[0];
    for (const auto& p : points) {
        for (std::size_t a = 0; a < p.size(); ++a) {
            b.lo[a] = std::min(b.lo[a], p[a]);
            b.hi[a] = std::max(b.hi[a], p[a]);
        }
    }
    for (std::size_t a = 0; a < b.lo.size(); ++a) {
        b.lo[a] -= pad;
        b.hi[a] += pad;
    }
    b.validate();
    return b;
}

void IntBox::validate() const {
    if (lo.size() != hi.size() || lo.size() < 2)
        throw std::invalid_argument("IntBox: dimension must be >= 2 and lo/hi consistent");
    for (int a = 0; a < dim(); ++a)
        if (lo[a] > hi[a]) throw std::invalid_argument("IntBox: empty extent");
}

LatticePoint psi_round(std::span<const double> x) {
    LatticePoint p(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double f = std::floor(x[a]);
        // frac is exact for |x| < 2^52, which avoids the x+0.5 rounding trap
        const double frac = x[a] - f;
        p[a] = static_cast<std::int64_t>(f) + (frac >= 0.5 ? 1 : 0);
    }
    return p;
}

}  // namespace fpcomp
