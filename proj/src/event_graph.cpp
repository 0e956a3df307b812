#include "fpcomp/event_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpcomp {

EventGraphIndex::EventGraphIndex(const OutburstEventSet& events) : events_(&events) {
    if (events.dim > 8) throw std::invalid_argument("event graph: dimension > 8 unsupported");
    cell_ = std::max(events.r_cap, 1e-12);
    const int d = events.dim;
    ncells_.resize(d);
    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) {
        const double extent = events.box.hi[a] - events.box.lo[a];
        ncells_[a] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(extent / cell_)));
        total *= ncells_[a];
    }

    // counting sort of events into cells (CSR layout)
    std::vector<std::int64_t> cell_of(events.count());
    cell_start_.assign(total + 1, 0);
    for (std::int64_t i = 0; i < events.count(); ++i) {
        std::int64_t idx = 0, stride = 1;
        const auto x = events.center(i);
        for (int a = 0; a < d; ++a) {
            idx += cell_coord(x[a], a) * stride;
            stride *= ncells_[a];
        }
        cell_of[i] = idx;
        ++cell_start_[idx + 1];
    }
    for (std::int64_t c = 0; c < total; ++c) cell_start_[c + 1] += cell_start_[c];
    cell_events_.resize(events.count());
    std::vector<std::int64_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::int64_t i = 0; i < events.count(); ++i) cell_events_[cursor[cell_of[i]]++] = i;
}

std::int64_t EventGraphIndex::cell_coord(double x, int axis) const {
    const double rel = (x - events_->box.lo[axis]) / cell_;
    auto c = static_cast<std::int64_t>(std::floor(rel));
    return std::clamp<std::int64_t>(c, 0, ncells_[axis] - 1);
}

std::int64_t EventGraphIndex::cell_index(std::span<const std::int64_t> cc) const {
    std::int64_t idx = 0, stride = 1;
    for (std::size_t a = 0; a < cc.size(); ++a) {
        idx += cc[a] * stride;
        stride *= ncells_[a];
    }
    return idx;
}

std::vector<std::int64_t> EventGraphIndex::events_in_ball(std::span<const double> center,
                                                          double radius) const {
    std::vector<std::int64_t> out;
    const double r2 = radius * radius;
    const int d = events_->dim;
    // the ball may be wider than one cell; walk the covered cell range
    std::int64_t lo[8], hi[8];
    for (int a = 0; a < d; ++a) {
        lo[a] = cell_coord(center[a] - radius, a);
        hi[a] = cell_coord(center[a] + radius, a);
    }
    std::int64_t cc[8];
    for (int a = 0; a < d; ++a) cc[a] = lo[a];
    while (true) {
        const std::int64_t idx = cell_index({cc, static_cast<std::size_t>(d)});
        for (std::int64_t k = cell_start_[idx]; k < cell_start_[idx + 1]; ++k) {
            const std::int64_t i = cell_events_[k];
            if (sq_distance(events_->center(i), center) <= r2) out.push_back(i);
        }
        int a = 0;
        for (;; ++a) {
            if (a == d) {
                std::sort(out.begin(), out.end());
                return out;
            }
            if (++cc[a] <= hi[a]) break;
            cc[a] = lo[a];
        }
    }
}

}  // namespace fpcomp
