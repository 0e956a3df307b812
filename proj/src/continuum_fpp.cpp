#include "fpcomp/continuum_fpp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpcomp {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

// neighbor relaxation over the event graph: leaving event u costs delay[u]
struct EventNeighbors {
    const EventGraphIndex& index;

    template <class Relax>
    void operator()(std::int64_t u, Relax&& relax) const {
        const double w = index.events().delays[u];
        index.for_centers_within(u, [&](std::int64_t v) { relax(v, w); });
    }
};

}  // namespace

bool SourceRegion::contains(std::span<const double> y) const {
    const double r2 = radius * radius;
    for (const auto& c : centers)
        if (sq_dist(c, y) <= r2) return true;
    return false;
}

ContinuumTimes::ContinuumTimes(const EventGraphIndex& index, SourceRegion source)
    : index_(&index), source_(std::move(source)) {
    const auto& ev = index.events();
    if (source_.centers.empty())
        throw std::invalid_argument("continuum passage time: empty source region");
    for (const auto& c : source_.centers) {
        if (static_cast<int>(c.size()) != ev.dim)
            throw std::invalid_argument("continuum passage time: source dimension mismatch");
        if (!(ev.box.distance(c) < source_.radius))
            throw std::invalid_argument(
                "continuum passage time: a source ball does not intersect the box");
    }
    std::vector<std::int64_t> seed_events;
    for (const auto& c : source_.centers) {
        const auto in_ball = index.events_in_ball(c, source_.radius);
        seed_events.insert(seed_events.end(), in_ball.begin(), in_ball.end());
    }
    std::sort(seed_events.begin(), seed_events.end());
    seed_events.erase(std::unique(seed_events.begin(), seed_events.end()), seed_events.end());

    std::vector<std::pair<std::int64_t, std::int32_t>> sources;
    sources.reserve(seed_events.size());
    for (std::int64_t e : seed_events) sources.emplace_back(e, 0);
    std::vector<std::int32_t> label;
    multi_source_label_dijkstra(ev.count(), sources, EventNeighbors{index}, dist_, label);
}

PointTime ContinuumTimes::at(std::span<const double> y) const {
    PointTime out;
    if (source_.contains(y)) {
        out.time = 0.0;
        return out;
    }
    const auto& ev = index_->events();
    double best = kInfiniteTime;
    index_->for_events_containing(y, [&](std::int64_t i) {
        if (dist_[i] == kInfiniteTime) return;
        best = std::min(best, dist_[i] + ev.delays[i]);
    });
    out.time = best;
    out.truncated = best == kInfiniteTime;
    return out;
}

PointTime ContinuumTimes::ball_time(std::span<const double> center, double radius,
                                    double pitch) const {
    if (!(pitch > 0.0)) throw std::invalid_argument("ball_time: pitch must be > 0");
    const auto& ev = index_->events();
    const int d = ev.dim;
    std::vector<double> p(center.begin(), center.end());
    PointTime out;
    out.time = 0.0;
    // the center itself, then all event centers inside the ball (chains enter
    // target balls through event centers, so including them keeps set-level
    // triangle comparisons exact), then the pitch grid of offsets
    {
        const PointTime t = at(p);
        out.time = t.time;
        out.truncated = t.truncated;
    }
    for (std::int64_t e : index_->events_in_ball(center, radius)) {
        const PointTime t = at(ev.center(e));
        out.time = std::max(out.time, t.time);
        out.truncated = out.truncated || t.truncated;
    }
    const auto span = static_cast<std::int64_t>(std::floor(radius / pitch));
    std::vector<std::int64_t> idx(d, -span);
    while (true) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double off = static_cast<double>(idx[a]) * pitch;
            p[a] = center[a] + off;
            r2 += off * off;
        }
        if (r2 <= radius * radius) {
            const PointTime t = at(p);
            out.time = std::max(out.time, t.time);
            out.truncated = out.truncated || t.truncated;
        }
        int a = 0;
        for (;; ++a) {
            if (a == d) return out;
            if (++idx[a] <= span) break;
            idx[a] = -span;
        }
    }
}

ContinuumTimes continuum_passage_time(const EventGraphIndex& index, const SourceRegion& source) {
    return ContinuumTimes(index, source);
}

std::vector<double> RealGrid::point_at(std::span<const std::int64_t> idx) const {
    std::vector<double> p(origin.size());
    for (std::size_t a = 0; a < origin.size(); ++a)
        p[a] = origin[a] + pitch * static_cast<double>(idx[a]);
    return p;
}

RealGrid RealGrid::cover(const RealBox& region, double pitch) {
    region.validate();
    if (!(pitch > 0.0)) throw std::invalid_argument("RealGrid: pitch must be > 0");
    RealGrid g;
    g.origin = region.lo;
    g.pitch = pitch;
    g.index_box.lo.assign(region.dim(), 0);
    g.index_box.hi.resize(region.dim());
    for (int a = 0; a < region.dim(); ++a) {
        const auto n = static_cast<std::int64_t>(std::floor((region.hi[a] - region.lo[a]) / pitch));
        g.index_box.hi[a] = std::max<std::int64_t>(n, 0);
    }
    return g;
}

ContinuumTerritories continuum_territories(const EventGraphIndex& index,
                                           const std::vector<std::vector<double>>& seed_centers,
                                           const RealGrid& grid, double seed_radius) {
    const auto& ev = index.events();
    if (seed_centers.size() < 2)
        throw std::invalid_argument("continuum_territories: k >= 2 seeds required");
    for (std::size_t i = 0; i < seed_centers.size(); ++i)
        for (std::size_t j = i + 1; j < seed_centers.size(); ++j)
            if (std::sqrt(sq_dist(seed_centers[i], seed_centers[j])) < 2.0 * seed_radius)
                throw std::invalid_argument("continuum_territories: seed balls overlap");
    for (const auto& c : seed_centers)
        if (!(ev.box.distance(c) < seed_radius))
            throw std::invalid_argument("continuum_territories: seed ball outside the box");

    // multi-source run over the shared event set, one label per seed
    std::vector<std::pair<std::int64_t, std::int32_t>> sources;
    for (std::size_t i = 0; i < seed_centers.size(); ++i) {
        for (std::int64_t e : index.events_in_ball(seed_centers[i], seed_radius))
            sources.emplace_back(e, static_cast<std::int32_t>(i));
    }
    std::vector<double> dist;
    std::vector<std::int32_t> label;
    multi_source_label_dijkstra(ev.count(), sources, EventNeighbors{index}, dist, label);

    ContinuumTerritories out;
    out.grid = grid;
    out.map.box = grid.index_box;
    out.map.k = static_cast<std::int32_t>(seed_centers.size());
    out.map.seed = ev.seed;
    const std::int64_t n = grid.index_box.size();
    out.map.winner.assign(n, kLabelUnreached);
    out.map.time.assign(n, kInfiniteTime);

    const double r2 = seed_radius * seed_radius;
    LatticePoint idx(grid.index_box.dim());
    for (std::int64_t g = 0; g < n; ++g) {
        grid.index_box.point_of(g, idx);
        const auto z = grid.point_at(idx);
        std::int32_t in_seed = kLabelUnreached;
        for (std::size_t i = 0; i < seed_centers.size(); ++i) {
            if (sq_dist(seed_centers[i], z) <= r2) {
                in_seed = static_cast<std::int32_t>(i);
                break;  // balls are disjoint
            }
        }
        if (in_seed != kLabelUnreached) {
            out.map.winner[g] = in_seed;
            out.map.time[g] = 0.0;
            continue;
        }
        double best = kInfiniteTime;
        std::int32_t best_label = kLabelUnreached;
        index.for_events_containing(z, [&](std::int64_t e) {
            if (dist[e] == kInfiniteTime) return;
            const double t = dist[e] + ev.delays[e];
            if (t < best) {
                best = t;
                best_label = label[e];
            } else if (t == best && label[e] != best_label) {
                best_label = kLabelTie;
            }
        });
        out.map.time[g] = best;
        out.map.winner[g] = best == kInfiniteTime ? kLabelUnreached : best_label;
    }
    return out;
}

BallGap ball_vs_point_gap(const EventGraphIndex& index, std::span<const double> x,
                          std::span<const double> y, double mesh_pitch) {
    SourceRegion a;
    a.centers.push_back(std::vector<double>(x.begin(), x.end()));
    a.radius = 1.0;
    const ContinuumTimes times(index, a);
    BallGap out;
    out.mesh_pitch = mesh_pitch;
    const PointTime tp = times.at(y);
    const PointTime tb = times.ball_time(y, 1.0, mesh_pitch);
    out.point_time = tp.time;
    out.ball_time = tb.time;
    out.truncated = tp.truncated || tb.truncated;
    out.gap = tb.time - tp.time;
    return out;
}

}  // namespace fpcomp
