#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpcomp/experiments.hpp"
#include "fpcomp/lattice_fpp.hpp"
#include "fpcomp/rng.hpp"

namespace fpcomp {

namespace {

// winner labels at the measured grid points for one replicate
std::vector<std::int32_t> lattice_rep_winners(const ExperimentPlan& plan, const StageGeometry& g,
                                              std::uint64_t rep_seed) {
    const auto field = plan.lattice.field_for(g.box, rep_seed);
    const bool per_type = plan.delta != 0.0;
    const auto map = competing_territories(field, g.sources, per_type);
    std::vector<std::int32_t> winners;
    winners.reserve(g.grid_points.size());
    if (per_type) {
        const auto labels = delta_winners(map, plan.delta);
        for (const auto& p : g.grid_points) winners.push_back(labels[g.box.index_of(p)]);
    } else {
        for (const auto& p : g.grid_points) winners.push_back(map.winner_at(p));
    }
    return winners;
}

std::vector<std::int32_t> continuum_rep_winners(const ExperimentPlan& plan, const StageGeometry& g,
                                                std::uint64_t rep_seed) {
    const auto ev = plan.continuum_model.events_for(g.rbox, rep_seed);
    const EventGraphIndex index(ev);
    std::vector<std::int32_t> winners(g.grid_coords.size(), kLabelUnreached);
    if (plan.delta == 0.0) {
        const auto terr = continuum_territories(index, g.scaled_sites, g.rgrid);
        for (std::int64_t i = 0; i < terr.map.box.size(); ++i) winners[i] = terr.map.winner[i];
        return winners;
    }
    // delta variant needs per-type times: one pass per seed ball
    const std::size_t k = g.scaled_sites.size();
    std::vector<ContinuumTimes> per_type;
    per_type.reserve(k);
    for (const auto& s : g.scaled_sites) {
        SourceRegion src;
        src.centers.push_back(s);
        per_type.emplace_back(index, src);
    }
    for (std::size_t gi = 0; gi < g.grid_coords.size(); ++gi) {
        double tmin = kInfiniteTime;
        std::vector<double> t(k);
        for (std::size_t i = 0; i < k; ++i) {
            t[i] = per_type[i].at(g.grid_coords[gi]).time;
            tmin = std::min(tmin, t[i]);
        }
        if (tmin == kInfiniteTime) continue;
        std::int32_t label = kLabelTie;  // reached but no delta-winner
        for (std::size_t i = 0; i < k; ++i) {
            bool wins = true;
            for (std::size_t j = 0; j < k && wins; ++j)
                if (j != i) wins = t[i] < t[j] - plan.delta;
            if (wins) {
                label = static_cast<std::int32_t>(i);
                break;
            }
        }
        winners[gi] = label;
    }
    return winners;
}

}  // namespace

TheoremReport density_experiment(const ExperimentPlan& plan, const Norm& norm, Exec exec) {
    plan.validate();
    if (norm.dimension() != plan.sites.dimension())
        throw std::invalid_argument("density_experiment: norm dimension mismatch");

    const auto in_i = positive_density_sites(plan, norm);
    const std::size_t k = plan.sites.k();
    bool any = false;
    for (bool b : in_i) any = any || b;
    if (!any)
        throw std::invalid_argument(
            "density_experiment: no site has a positive-density Voronoi cell");

    TheoremReport report;
    report.in_i = std::vector<bool>(in_i.begin(), in_i.end());

    for (std::size_t ri = 0; ri < plan.scale_ladder.size(); ++ri) {
        const double R = plan.scale_ladder[ri];
        const auto g = stage_geometry(plan, R);
        const std::int64_t n_grid = static_cast<std::int64_t>(g.grid_coords.size());

        // Voronoi cell of the scaled sites at each measured grid point
        SiteConfiguration scaled_cfg;
        scaled_cfg.sites = g.scaled_sites;
        std::vector<std::int32_t> cell(n_grid, kLabelTie);
        for (std::int64_t gi = 0; gi < n_grid; ++gi) {
            for (std::size_t i = 0; i < k; ++i) {
                if (voronoi_member(g.grid_coords[gi], i, scaled_cfg, norm)) {
                    cell[gi] = static_cast<std::int32_t>(i);
                    break;
                }
            }
        }
        std::vector<double> grid_radius(n_grid);
        for (std::int64_t gi = 0; gi < n_grid; ++gi)
            grid_radius[gi] = euclidean_norm(g.grid_coords[gi]);

        // replicate fan-out; slots keep the reduction order deterministic
        std::vector<std::vector<std::int32_t>> rep_winners(plan.n_reps);
        for_each_index(exec, plan.n_reps, [&](std::int64_t rep) {
            const std::uint64_t rep_seed = hash_u64(
                hash_u64(hash_u64(plan.master_seed, 0x64656e73657870ULL), ri),
                static_cast<std::uint64_t>(rep));
            rep_winners[rep] = plan.continuum
                                   ? continuum_rep_winners(plan, g, rep_seed)
                                   : lattice_rep_winners(plan, g, rep_seed);
        });

        ScaleReport scale;
        scale.R = R;
        scale.guard_margin = g.guard_margin;
        scale.rho_max = g.rho_max;
        scale.grid_points = n_grid;

        std::vector<std::vector<std::int64_t>> win_count(k,
                                                         std::vector<std::int64_t>(n_grid, 0));
        for (const auto& winners : rep_winners) {
            for (std::int64_t gi = 0; gi < n_grid; ++gi) {
                const auto w = winners[gi];
                if (w >= 0) ++win_count[w][gi];
                else if (w == kLabelTie) ++scale.ties_observed;
                else ++scale.unreached_observed;
            }
        }

        // facet (b): per-replicate box density per site, within B(rho_max)
        std::vector<std::vector<double>> rep_density(k);
        std::int64_t all_above = 0;
        for (const auto& winners : rep_winners) {
            bool rep_ok = true;
            for (std::size_t i = 0; i < k; ++i) {
                std::int64_t num = 0, den = 0;
                for (std::int64_t gi = 0; gi < n_grid; ++gi) {
                    if (cell[gi] != static_cast<std::int32_t>(i)) continue;
                    if (grid_radius[gi] > g.rho_max) continue;
                    ++den;
                    if (winners[gi] == static_cast<std::int32_t>(i)) ++num;
                }
                const double dens = den > 0 ? static_cast<double>(num) / static_cast<double>(den)
                                          : std::nan("");
                rep_density[i].push_back(dens);
                if (in_i[i] && !(dens >= 1.0 - plan.epsilon)) rep_ok = false;
            }
            if (rep_ok) ++all_above;
        }
        scale.frac_reps_all_above =
            static_cast<double>(all_above) / static_cast<double>(plan.n_reps);

        for (std::size_t i = 0; i < k; ++i) {
            SiteScaleReport site;
            site.site = static_cast<int>(i);
            site.in_i = in_i[i];
            site.rep_densities = rep_density[i];
            std::vector<double> finite;
            for (double v : rep_density[i])
                if (!std::isnan(v)) finite.push_back(v);
            const auto m = mean_se(finite);
            site.rep_density_mean = m.mean;
            site.rep_density_se = m.se;

            // facet (a): density of {P_hat >= 1 - eps} against V_i over the radii
            site.facet_a.radii = g.radii;
            const double n_reps_d = static_cast<double>(plan.n_reps);
            for (const double rho : g.radii) {
                std::int64_t num = 0, den = 0;
                for (std::int64_t gi = 0; gi < n_grid; ++gi) {
                    if (cell[gi] != static_cast<std::int32_t>(i)) continue;
                    if (grid_radius[gi] > rho) continue;
                    ++den;
                    const double p_hat = static_cast<double>(win_count[i][gi]) / n_reps_d;
                    if (p_hat >= 1.0 - plan.epsilon) ++num;
                }
                site.facet_a.numerators.push_back(num);
                site.facet_a.denominators.push_back(den);
                site.facet_a.ratios.push_back(
                    den > 0 ? static_cast<double>(num) / static_cast<double>(den) : std::nan(""));
            }
            for (std::int64_t gi = 0; gi < n_grid; ++gi) {
                if (cell[gi] != static_cast<std::int32_t>(i) || grid_radius[gi] > g.rho_max)
                    continue;
                const double p_hat = static_cast<double>(win_count[i][gi]) / n_reps_d;
                const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / n_reps_d);
                if (std::abs(p_hat - (1.0 - plan.epsilon)) <= se) ++site.facet_a.fragile_points;
            }
            std::size_t window = static_cast<std::size_t>(
                std::llround(plan.tail_window * static_cast<double>(g.radii.size())));
            window = std::clamp<std::size_t>(window, 1, g.radii.size());
            double lo = 2.0, hi = -1.0;
            for (std::size_t w = g.radii.size() - window; w < g.radii.size(); ++w) {
                const double v = site.facet_a.ratios[w];
                if (std::isnan(v)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            site.facet_a.lower = lo <= 1.0 ? lo : 0.0;
            site.facet_a.upper = hi >= 0.0 ? hi : 0.0;
            scale.sites.push_back(std::move(site));
        }
        report.scales.push_back(std::move(scale));
    }

    // monotone-trend diagnostic per site: facet-a lower estimate against R
    report.spearman_lower.assign(k, 0.0);
    if (report.scales.size() >= 2) {
        std::vector<double> rs;
        for (const auto& s : report.scales) rs.push_back(s.R);
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> lows;
            for (const auto& s : report.scales) lows.push_back(s.sites[i].facet_a.lower);
            report.spearman_lower[i] = spearman_rho(rs, lows);
        }
    }
    return report;
}

}  // namespace fpcomp
