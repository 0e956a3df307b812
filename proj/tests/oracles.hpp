#pragma once

// Test-only oracles. These deliberately avoid the library's search code:
// passage times come from exhaustive enumeration so they can disagree with
// the implementation if it is wrong.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "fpcomp/grid.hpp"
#include "fpcomp/outbursts.hpp"

namespace fpcomp::testing {

using WeightFn =
    std::function<double(std::span<const std::int64_t>, std::span<const std::int64_t>)>;

// Min over all simple paths from a to b inside the box (simple paths suffice
// for nonnegative weights). Intended for boxes up to ~3x3.
inline double brute_force_lattice_time(const IntBox& box, const LatticePoint& a,
                                       const LatticePoint& b, const WeightFn& weight) {
    const std::int64_t n = box.size();
    std::vector<char> visited(n, 0);
    double best = std::numeric_limits<double>::infinity();
    LatticePoint cur = a;

    std::function<void(double)> dfs = [&](double acc) {
        if (acc >= best) return;  // sound: weights are nonnegative
        if (cur == b) {
            best = acc;
            return;
        }
        const LatticePoint here = cur;
        for (int axis = 0; axis < box.dim(); ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                LatticePoint next = here;
                next[axis] += dir;
                if (!box.contains(next)) continue;
                const std::int64_t idx = box.index_of(next);
                if (visited[idx]) continue;
                visited[idx] = 1;
                cur = next;
                dfs(acc + weight(here, next));
                cur = here;
                visited[idx] = 0;
            }
        }
    };

    visited[box.index_of(a)] = 1;
    dfs(0.0);
    return best;
}

// Min chain cost from a union of source balls to a target point, enumerating
// every ordered sequence of distinct events. Intended for <= 6 events.
inline double brute_force_chain_time(const OutburstEventSet& ev,
                                     const std::vector<std::vector<double>>& source_centers,
                                     double source_radius, std::span<const double> target) {
    const auto sq = [](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
        return s;
    };
    const auto same = [](std::span<const double> a, std::span<const double> b) {
        for (std::size_t c = 0; c < a.size(); ++c)
            if (a[c] != b[c]) return false;
        return true;
    };

    for (const auto& s : source_centers)
        if (sq(s, target) <= source_radius * source_radius) return 0.0;

    const std::int64_t n = ev.count();
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(n, 0);

    std::function<void(std::int64_t, double)> extend = [&](std::int64_t last, double acc) {
        const double exit_cost = acc + ev.delays[last];
        if (exit_cost >= best) return;
        // the last event's ball may already cover the target
        if (sq(ev.center(last), target) <= ev.radii[last] * ev.radii[last] &&
            !same(ev.center(last), target))
            best = std::min(best, exit_cost);
        for (std::int64_t nxt = 0; nxt < n; ++nxt) {
            if (used[nxt]) continue;
            if (sq(ev.center(last), ev.center(nxt)) > ev.radii[last] * ev.radii[last]) continue;
            if (same(ev.center(last), ev.center(nxt))) continue;
            used[nxt] = 1;
            extend(nxt, exit_cost);
            used[nxt] = 0;
        }
    };

    for (std::int64_t first = 0; first < n; ++first) {
        bool in_source = false;
        for (const auto& s : source_centers)
            in_source = in_source || sq(s, ev.center(first)) <= source_radius * source_radius;
        if (!in_source) continue;
        used[first] = 1;
        extend(first, 0.0);
        used[first] = 0;
    }
    return best;
}

}  // namespace fpcomp::testing
