#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace fpcomp {

inline constexpr std::int32_t kLabelTie = -1;
inline constexpr std::int32_t kLabelUnreached = -2;
inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Multi-source label-setting shortest paths with exact tie handling.
//
// The distance array is the usual Dijkstra result. Labels propagate along
// optimal predecessors: a node reached optimally from two different labels
// becomes a tie, and ties are absorbing. Because an equal-cost path can be
// discovered after a node was settled (only via zero-weight edges), a node
// whose label changes post-settlement is pushed again so the new label
// reaches its neighbors; each node re-enters at most once per label change,
// so the fixpoint costs O(V) extra pops.
//
// for_each_neighbor(u, relax) must call relax(v, w) for every edge u -> v
// with weight w >= 0. Weights on the 2^-26 grid make equality exact.
template <class NeighborFn>
void multi_source_label_dijkstra(
    std::int64_t n_nodes, std::span<const std::pair<std::int64_t, std::int32_t>> sources,
    NeighborFn&& for_each_neighbor, std::vector<double>& dist,
    std::vector<std::int32_t>& label) {
    dist.assign(static_cast<std::size_t>(n_nodes), kInfiniteTime);
    label.assign(static_cast<std::size_t>(n_nodes), kLabelUnreached);

    using Entry = std::pair<double, std::int64_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    std::vector<char> settled(static_cast<std::size_t>(n_nodes), 0);
    std::vector<char> dirty(static_cast<std::size_t>(n_nodes), 0);

    for (const auto& [node, lab] : sources) {
        if (dist[node] == 0.0 && label[node] != lab)
            label[node] = kLabelTie;  // two sources on one node
        else {
            dist[node] = 0.0;
            label[node] = lab;
        }
        heap.push({0.0, node});
    }

    while (!heap.empty()) {
        const auto [t, u] = heap.top();
        heap.pop();
        if (t > dist[u]) continue;  // stale entry
        if (settled[u] && !dirty[u]) continue;
        settled[u] = 1;
        dirty[u] = 0;
        const std::int32_t lu = label[u];
        for_each_neighbor(u, [&, t = t, u = u](std::int64_t v, double w) {
            const double nd = t + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                label[v] = lu;
                heap.push({nd, v});
            } else if (nd == dist[v] && label[v] != lu && label[v] != kLabelTie) {
                label[v] = kLabelTie;
                if (settled[v]) {
                    dirty[v] = 1;
                    heap.push({dist[v], v});
                }
            }
        });
    }
}

// Single-source convenience wrapper (labels discarded).
template <class NeighborFn>
void single_source_dijkstra(std::int64_t n_nodes, std::int64_t source,
                            NeighborFn&& for_each_neighbor, std::vector<double>& dist) {
    std::vector<std::int32_t> label;
    const std::pair<std::int64_t, std::int32_t> src[] = {{source, 0}};
    multi_source_label_dijkstra(n_nodes, src, std::forward<NeighborFn>(for_each_neighbor), dist,
                                label);
}

}  // namespace fpcomp
