#include "fpcomp/lattice_fpp.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "fpcomp/voronoi.hpp"

namespace fpcomp {

namespace {

std::vector<std::int64_t> box_strides(const IntBox& box) {
    std::vector<std::int64_t> s(box.dim());
    std::int64_t stride = 1;
    for (int a = 0; a < box.dim(); ++a) {
        s[a] = stride;
        stride *= box.extent(a);
    }
    return s;
}

// Neighbor iteration over the box lattice with lazily hashed edge weights.
struct LatticeNeighbors {
    const PassageTimeField& field;
    std::vector<std::int64_t> strides;
    mutable LatticePoint coords;

    explicit LatticeNeighbors(const PassageTimeField& f)
        : field(f), strides(box_strides(f.box)), coords(f.dim) {}

    template <class Relax>
    void operator()(std::int64_t u, Relax&& relax) const {
        field.box.point_of(u, coords);
        for (int a = 0; a < field.dim; ++a) {
            if (coords[a] < field.box.hi[a])
                relax(u + strides[a], field.edge_weight_lower(coords, a));
            if (coords[a] > field.box.lo[a]) {
                coords[a] -= 1;
                const double w = field.edge_weight_lower(coords, a);
                coords[a] += 1;
                relax(u - strides[a], w);
            }
        }
    }
};

}  // namespace

std::vector<double> first_passage_time(const PassageTimeField& field,
                                       std::span<const std::int64_t> source) {
    if (!field.box.contains(source))
        throw std::invalid_argument("first_passage_time: source outside the box");
    std::vector<double> dist;
    single_source_dijkstra(field.box.size(), field.box.index_of(source),
                           LatticeNeighbors(field), dist);
    return dist;
}

double first_passage_time(const PassageTimeField& field, std::span<const std::int64_t> source,
                          std::span<const std::int64_t> target) {
    if (!field.box.contains(target))
        throw std::invalid_argument("first_passage_time: target outside the box");
    const auto dist = first_passage_time(field, source);
    return dist[field.box.index_of(target)];
}

TerritoryMap competing_territories(const PassageTimeField& field,
                                   const std::vector<LatticePoint>& sources, bool keep_per_type) {
    if (sources.size() < 2)
        throw std::invalid_argument("competing_territories: k >= 2 sources required");
    for (const auto& s : sources)
        if (!field.box.contains(s))
            throw std::invalid_argument("competing_territories: source outside the box");
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j)
            if (sources[i] == sources[j])
                throw std::invalid_argument(
                    "competing_territories: sources collapse to the same lattice point");

    TerritoryMap map;
    map.box = field.box;
    map.k = static_cast<std::int32_t>(sources.size());
    map.seed = field.seed;

    if (keep_per_type) {
        const std::int64_t n = field.box.size();
        map.per_type_times.reserve(sources.size());
        for (const auto& s : sources) map.per_type_times.push_back(first_passage_time(field, s));
        map.time.assign(n, kInfiniteTime);
        map.winner.assign(n, kLabelUnreached);
        for (std::int64_t z = 0; z < n; ++z) {
            double tmin = kInfiniteTime;
            for (std::int32_t i = 0; i < map.k; ++i) tmin = std::min(tmin, map.per_type_times[i][z]);
            map.time[z] = tmin;
            if (tmin == kInfiniteTime) continue;
            std::int32_t best = kLabelUnreached;
            int hits = 0;
            for (std::int32_t i = 0; i < map.k; ++i) {
                if (map.per_type_times[i][z] == tmin) {
                    ++hits;
                    best = i;
                }
            }
            map.winner[z] = hits == 1 ? best : kLabelTie;
        }
        return map;
    }

    std::vector<std::pair<std::int64_t, std::int32_t>> seeds;
    seeds.reserve(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i)
        seeds.emplace_back(field.box.index_of(sources[i]), static_cast<std::int32_t>(i));
    multi_source_label_dijkstra(field.box.size(), seeds, LatticeNeighbors(field), map.time,
                                map.winner);
    return map;
}

std::vector<std::int32_t> delta_winners(const TerritoryMap& map, double delta) {
    if (map.per_type_times.empty())
        throw std::invalid_argument("delta_winners: per-type times were not retained");
    const std::int64_t n = map.box.size();
    std::vector<std::int32_t> out(n, kLabelUnreached);
    for (std::int64_t z = 0; z < n; ++z) {
        double tmin = kInfiniteTime;
        for (std::int32_t i = 0; i < map.k; ++i) tmin = std::min(tmin, map.per_type_times[i][z]);
        if (tmin == kInfiniteTime) continue;
        std::int32_t found = kLabelTie;  // reached, but no delta-winner
        for (std::int32_t i = 0; i < map.k; ++i) {
            bool wins = true;
            for (std::int32_t j = 0; j < map.k && wins; ++j) {
                if (j == i) continue;
                wins = map.per_type_times[i][z] < map.per_type_times[j][z] - delta;
            }
            if (wins) {
                found = i;
                break;
            }
        }
        out[z] = found;
    }
    return out;
}

Palette Palette::standard() {
    Palette p;
    p.type_colors = {
        {220, 50, 47}, {38, 139, 210}, {133, 153, 0},  {211, 54, 130},
        {203, 75, 22}, {108, 113, 196}, {42, 161, 152}, {181, 137, 0},
    };
    return p;
}

Image territory_image(const TerritoryMap& map, const Palette& palette, const Norm* overlay_norm,
                      const SiteConfiguration* overlay_sites) {
    if (map.box.dim() != 2)
        throw std::invalid_argument("territory_image: raster export requires d = 2");
    Image img;
    img.width = map.box.extent(0);
    img.height = map.box.extent(1);
    img.rgb.assign(static_cast<std::size_t>(3 * img.width * img.height), 0);

    std::vector<std::int32_t> cell;  // Voronoi label per site when overlaying
    if (overlay_norm && overlay_sites) {
        cell.assign(static_cast<std::size_t>(map.box.size()), kLabelTie);
        LatticePoint p(2);
        std::vector<double> z(2);
        for (std::int64_t idx = 0; idx < map.box.size(); ++idx) {
            map.box.point_of(idx, p);
            z[0] = static_cast<double>(p[0]);
            z[1] = static_cast<double>(p[1]);
            for (std::size_t i = 0; i < overlay_sites->k(); ++i) {
                if (voronoi_member(z, i, *overlay_sites, *overlay_norm)) {
                    cell[idx] = static_cast<std::int32_t>(i);
                    break;
                }
            }
        }
    }

    LatticePoint p(2);
    for (std::int64_t row = 0; row < img.height; ++row) {
        p[1] = map.box.hi[1] - row;  // top row = largest y
        for (std::int64_t col = 0; col < img.width; ++col) {
            p[0] = map.box.lo[0] + col;
            const std::int64_t idx = map.box.index_of(p);
            const std::int32_t w = map.winner[idx];
            std::array<std::uint8_t, 3> color;
            if (w == kLabelTie)
                color = palette.tie_color;
            else if (w == kLabelUnreached)
                color = palette.unreached_color;
            else
                color = palette.type_colors[static_cast<std::size_t>(w) %
                                            palette.type_colors.size()];
            if (!cell.empty()) {
                // darken pixels where the Voronoi cell changes to a neighbor
                bool boundary = false;
                if (p[0] < map.box.hi[0]) {
                    LatticePoint q = p;
                    q[0] += 1;
                    boundary |= cell[map.box.index_of(q)] != cell[idx];
                }
                if (p[1] > map.box.lo[1]) {
                    LatticePoint q = p;
                    q[1] -= 1;
                    boundary |= cell[map.box.index_of(q)] != cell[idx];
                }
                if (boundary) color = palette.overlay_color;
            }
            const std::size_t o = static_cast<std::size_t>(3 * (row * img.width + col));
            img.rgb[o] = color[0];
            img.rgb[o + 1] = color[1];
            img.rgb[o + 2] = color[2];
        }
    }
    return img;
}

}  // namespace fpcomp
