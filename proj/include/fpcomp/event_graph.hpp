#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fpcomp/outbursts.hpp"

namespace fpcomp {

// Uniform spatial hash grid over event centers, cell size >= r_cap, so both
// query kinds touch only the 3^d surrounding cells:
//   - events whose ball contains a point (every such center is within r_cap)
//   - event centers inside a given event's ball (its radius is <= r_cap)
class EventGraphIndex {
public:
    explicit EventGraphIndex(const OutburstEventSet& events);

    const OutburstEventSet& events() const { return *events_; }

    // f(i) for every event i with |y - X_i| <= R_i and y != X_i
    template <class F>
    void for_events_containing(std::span<const double> y, F&& f) const {
        visit_cells_around(y, [&](std::int64_t i) {
            if (sq_distance(center(i), y) <= radius(i) * radius(i) && !same_point(center(i), y))
                f(i);
        });
    }

    // f(j) for every event j != i whose center lies in event i's ball
    template <class F>
    void for_centers_within(std::int64_t i, F&& f) const {
        const auto xi = center(i);
        const double r2 = radius(i) * radius(i);
        visit_cells_around(xi, [&](std::int64_t j) {
            if (j != i && sq_distance(center(j), xi) <= r2 && !same_point(center(j), xi)) f(j);
        });
    }

    // events with center in the closed ball (seed regions)
    std::vector<std::int64_t> events_in_ball(std::span<const double> center, double radius) const;

    double cell_size() const { return cell_; }

private:
    std::span<const double> center(std::int64_t i) const { return events_->center(i); }
    double radius(std::int64_t i) const { return events_->radii[i]; }

    static double sq_distance(std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) {
            const double d = a[c] - b[c];
            s += d * d;
        }
        return s;
    }
    static bool same_point(std::span<const double> a, std::span<const double> b) {
        for (std::size_t c = 0; c < a.size(); ++c)
            if (a[c] != b[c]) return false;
        return true;
    }

    std::int64_t cell_coord(double x, int axis) const;
    std::int64_t cell_index(std::span<const std::int64_t> cc) const;

    template <class F>
    void visit_cells_around(std::span<const double> p, F&& f) const;

    const OutburstEventSet* events_;
    double cell_ = 1.0;
    std::vector<std::int64_t> ncells_;          // per axis
    std::vector<std::int64_t> cell_start_;      // CSR offsets
    std::vector<std::int64_t> cell_events_;     // event ids grouped by cell
};

template <class F>
void EventGraphIndex::visit_cells_around(std::span<const double> p, F&& f) const {
    const int d = events_->dim;
    std::int64_t cc[8];
    for (int a = 0; a < d; ++a) cc[a] = cell_coord(p[a], a);
    // odometer over the 3^d neighborhood, clamped to the grid
    std::int64_t off[8];
    for (int a = 0; a < d; ++a) off[a] = -1;
    while (true) {
        bool in_grid = true;
        std::int64_t idx = 0, stride = 1;
        for (int a = 0; a < d && in_grid; ++a) {
            const std::int64_t c = cc[a] + off[a];
            if (c < 0 || c >= ncells_[a]) in_grid = false;
            idx += c * stride;
            stride *= ncells_[a];
        }
        if (in_grid) {
            for (std::int64_t k = cell_start_[idx]; k < cell_start_[idx + 1]; ++k)
                f(cell_events_[k]);
        }
        int a = 0;
        for (;; ++a) {
            if (a == d) return;
            if (++off[a] <= 1) break;
            off[a] = -1;
        }
    }
}

}  // namespace fpcomp
