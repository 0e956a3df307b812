#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fpcomp/edge_weights.hpp"
#include "fpcomp/grid.hpp"
#include "fpcomp/label_dijkstra.hpp"
#include "fpcomp/norm.hpp"

namespace fpcomp {

// Passage times from one source to every site of the field's box, restricted
// to paths inside the box.
std::vector<double> first_passage_time(const PassageTimeField& field,
                                       std::span<const std::int64_t> source);

double first_passage_time(const PassageTimeField& field, std::span<const std::int64_t> source,
                          std::span<const std::int64_t> target);

// Winner map of the k-type competition: per box site the argmin over sources
// of the passage time on the shared weight field, with exact ties kept.
struct TerritoryMap {
    IntBox box;
    std::int32_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::int32_t> winner;  // 0..k-1, kLabelTie, kLabelUnreached
    std::vector<double> time;          // min over sources; +inf when unreached
    std::vector<std::vector<double>> per_type_times;  // optional, [k][site]

    std::int32_t winner_at(std::span<const std::int64_t> p) const {
        return winner[box.index_of(p)];
    }
    double time_at(std::span<const std::int64_t> p) const { return time[box.index_of(p)]; }
};

// Sources must be pairwise distinct (psi-rounding collisions are an error)
// and inside the box. keep_per_type runs one pass per source and retains the
// full per-type time arrays; the winner map is identical either way.
TerritoryMap competing_territories(const PassageTimeField& field,
                                   const std::vector<LatticePoint>& sources,
                                   bool keep_per_type = false);

// Winner map recomputed from retained per-type times with the shrunken
// criterion T_i < T_j - delta for all j != i (no strict winner -> tie when
// the min is attained twice exactly, which only happens at delta = 0).
std::vector<std::int32_t> delta_winners(const TerritoryMap& map, double delta);

struct Palette {
    std::vector<std::array<std::uint8_t, 3>> type_colors;
    std::array<std::uint8_t, 3> tie_color{255, 255, 255};
    std::array<std::uint8_t, 3> unreached_color{0, 0, 0};
    std::array<std::uint8_t, 3> overlay_color{40, 40, 40};

    static Palette standard();
};

struct Image {
    std::int64_t width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major, top row first
};

// One pixel per box site; d = 2 only. When a norm and sites are supplied,
// pixels adjacent to a Voronoi cell change are darkened as a boundary
// overlay.
Image territory_image(const TerritoryMap& map, const Palette& palette = Palette::standard(),
                      const Norm* overlay_norm = nullptr,
                      const SiteConfiguration* overlay_sites = nullptr);

}  // namespace fpcomp
