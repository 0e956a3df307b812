#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fpcomp/density.hpp"
#include "fpcomp/experiments.hpp"
#include "fpcomp/grid.hpp"
#include "fpcomp/rng.hpp"

namespace fpcomp {

void ExperimentPlan::validate() const {
    sites.validate();
    if (scale_ladder.empty()) throw std::invalid_argument("plan: scale_ladder is empty");
    for (std::size_t i = 0; i + 1 < scale_ladder.size(); ++i)
        if (!(scale_ladder[i] < scale_ladder[i + 1]))
            throw std::invalid_argument("plan: scale_ladder must be strictly increasing");
    if (!(scale_ladder.front() > 0.0)) throw std::invalid_argument("plan: scales must be positive");
    if (n_reps < 1) throw std::invalid_argument("plan: n_reps must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("plan: epsilon in (0,1)");
    if (!(box_multiplier > 1.0)) throw std::invalid_argument("plan: box_multiplier must be > 1");
    if (!(guard_factor >= 0.0)) throw std::invalid_argument("plan: guard_factor must be >= 0");
    if (!(grid_pitch > 0.0)) throw std::invalid_argument("plan: grid_pitch must be > 0");
    if (!(shell_factor > 0.0)) throw std::invalid_argument("plan: shell_factor must be > 0");
    if (radius_fractions.empty()) throw std::invalid_argument("plan: radius_fractions empty");
    for (std::size_t i = 0; i < radius_fractions.size(); ++i) {
        if (!(radius_fractions[i] > 0.0 && radius_fractions[i] <= 1.0))
            throw std::invalid_argument("plan: radius_fractions must lie in (0, 1]");
        if (i > 0 && !(radius_fractions[i - 1] < radius_fractions[i]))
            throw std::invalid_argument("plan: radius_fractions must be increasing");
    }
    if (!(tail_window > 0.0 && tail_window <= 1.0))
        throw std::invalid_argument("plan: tail_window in (0, 1]");
    const int d = sites.dimension();
    if (continuum && d > 8) throw std::invalid_argument("plan: continuum supports d <= 8");
    (void)d;
}

StageGeometry stage_geometry(const ExperimentPlan& plan, double R) {
    plan.validate();
    StageGeometry g;
    g.R = R;
    const int d = plan.sites.dimension();
    const std::size_t k = plan.sites.k();

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        g.scaled_sites.push_back(scaled(plan.sites.sites[i], R * plan.sites.scale));
        for (int a = 0; a < d; ++a) centroid[a] += g.scaled_sites.back()[a];
    }
    for (int a = 0; a < d; ++a) centroid[a] /= static_cast<double>(k);

    double extent = 0.0;
    for (const auto& s : g.scaled_sites)
        extent = std::max(extent, euclidean_norm(sub(s, centroid)));
    g.min_spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            g.min_spacing =
                std::min(g.min_spacing, euclidean_norm(sub(g.scaled_sites[i], g.scaled_sites[j])));

    const double halfwidth = 0.5 * plan.box_multiplier * std::max(R, extent);
    g.guard_margin = plan.guard_factor * g.min_spacing;
    if (!(g.guard_margin < halfwidth))
        throw std::invalid_argument(
            "stage geometry: box too small for the guard margin; raise box_multiplier");

    if (!plan.continuum) {
        const auto c = psi_round(centroid);
        const auto hw = static_cast<std::int64_t>(std::ceil(halfwidth));
        g.box.lo.resize(d);
        g.box.hi.resize(d);
        for (int a = 0; a < d; ++a) {
            g.box.lo[a] = c[a] - hw;
            g.box.hi[a] = c[a] + hw;
        }
        for (const auto& s : g.scaled_sites) {
            g.sources.push_back(psi_round(s));
            if (!g.box.contains(g.sources.back()))
                throw std::invalid_argument("stage geometry: source outside the box");
        }
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (g.sources[i] == g.sources[j])
                    throw std::invalid_argument(
                        "stage geometry: sites collapse to the same lattice point under psi");

        const auto margin = static_cast<std::int64_t>(std::ceil(g.guard_margin));
        const auto pitch = static_cast<std::int64_t>(std::llround(plan.grid_pitch));
        if (pitch < 1)
            throw std::invalid_argument("stage geometry: lattice grid pitch must be >= 1");
        IntBox measured;
        measured.lo.resize(d);
        measured.hi.resize(d);
        for (int a = 0; a < d; ++a) {
            measured.lo[a] = g.box.lo[a] + margin;
            measured.hi[a] = g.box.hi[a] - margin;
            if (measured.lo[a] > measured.hi[a])
                throw std::invalid_argument("stage geometry: guard margin leaves no measured grid");
        }
        // density balls are centered at the origin; it must be measurable
        g.rho_max = std::numeric_limits<double>::infinity();
        for (int a = 0; a < d; ++a) {
            g.rho_max = std::min(g.rho_max, static_cast<double>(-measured.lo[a]));
            g.rho_max = std::min(g.rho_max, static_cast<double>(measured.hi[a]));
        }
        if (!(g.rho_max > 0.0))
            throw std::invalid_argument(
                "stage geometry: origin is not inside the measured region");

        LatticePoint p(d);
        std::vector<std::int64_t> idx(d);
        for (int a = 0; a < d; ++a) idx[a] = measured.lo[a];
        while (true) {
            g.grid_points.push_back(LatticePoint(idx.begin(), idx.end()));
            int a = 0;
            for (;; ++a) {
                if (a == d) break;
                idx[a] += pitch;
                if (idx[a] <= measured.hi[a]) break;
                idx[a] = measured.lo[a];
            }
            if (a == d) break;
        }
        for (const auto& gp : g.grid_points)
            g.grid_coords.push_back(std::vector<double>(gp.begin(), gp.end()));
    } else {
        g.rbox.lo.resize(d);
        g.rbox.hi.resize(d);
        for (int a = 0; a < d; ++a) {
            g.rbox.lo[a] = centroid[a] - halfwidth;
            g.rbox.hi[a] = centroid[a] + halfwidth;
        }
        RealBox measured;
        measured.lo.resize(d);
        measured.hi.resize(d);
        for (int a = 0; a < d; ++a) {
            measured.lo[a] = g.rbox.lo[a] + g.guard_margin;
            measured.hi[a] = g.rbox.hi[a] - g.guard_margin;
            if (!(measured.lo[a] < measured.hi[a]))
                throw std::invalid_argument("stage geometry: guard margin leaves no measured grid");
        }
        g.rho_max = std::numeric_limits<double>::infinity();
        for (int a = 0; a < d; ++a) {
            g.rho_max = std::min(g.rho_max, -measured.lo[a]);
            g.rho_max = std::min(g.rho_max, measured.hi[a]);
        }
        if (!(g.rho_max > 0.0))
            throw std::invalid_argument(
                "stage geometry: origin is not inside the measured region");
        g.rgrid = RealGrid::cover(measured, plan.grid_pitch);
        LatticePoint idx(d);
        for (std::int64_t i = 0; i < g.rgrid.index_box.size(); ++i) {
            g.rgrid.index_box.point_of(i, idx);
            g.grid_coords.push_back(g.rgrid.point_at(idx));
        }
    }

    for (double f : plan.radius_fractions) g.radii.push_back(f * g.rho_max);
    return g;
}

std::vector<bool> positive_density_sites(const ExperimentPlan& plan, const Norm& norm,
                                         double threshold) {
    const std::size_t k = plan.sites.k();
    std::vector<bool> in_i(k, false);
    if (plan.sites_on_norm_sphere) {
        // segment criterion: i qualifies when every segment [x_i, x_j] dips
        // strictly inside the unit ball
        const auto geo = coexistence_geometry_check(plan.sites, norm);
        for (std::size_t i = 0; i < k; ++i) {
            bool ok = true;
            for (const auto& pw : geo.pairs)
                if (pw.i == i || pw.j == i) ok = ok && pw.pass;
            in_i[i] = ok;
        }
        return in_i;
    }
    // direct estimation of dens(V_i) over a comfortably large ball
    double max_norm = 0.0;
    for (const auto& s : plan.sites.sites)
        max_norm = std::max(max_norm, euclidean_norm(scaled(s, plan.sites.scale)));
    const double radius = 3.0 * std::max(1.0, max_norm);
    const SetPredicate everything = [](std::span<const double>) { return true; };
    for (std::size_t i = 0; i < k; ++i) {
        DensityEstimatorConfig cfg;
        cfg.samples = 40000;
        cfg.seed = hash_u64(plan.master_seed, 0x64656e735f69ULL + i);
        const SetPredicate vi = [&](std::span<const double> z) {
            return voronoi_member(z, i, plan.sites, norm);
        };
        const auto rep = relative_density(vi, everything, plan.sites.dimension(),
                                          {0.5 * radius, radius}, cfg);
        in_i[i] = rep.rows.back().defined && rep.rows.back().ratio > threshold;
    }
    return in_i;
}

}  // namespace fpcomp
