#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fpcomp/experiments.hpp"
#include "fpcomp/lattice_fpp.hpp"
#include "fpcomp/rng.hpp"

namespace fpcomp {

CoexistenceReport coexistence_experiment(const ExperimentPlan& plan, const Norm& norm, Exec exec) {
    plan.validate();
    const std::size_t k = plan.sites.k();

    // geometric precondition
    if (!plan.continuum) {
        const auto geo = coexistence_geometry_check(plan.sites, norm);
        if (!geo.all_pass) {
            for (const auto& pw : geo.pairs) {
                if (!pw.pass) {
                    std::ostringstream os;
                    os << "coexistence precondition failed: segment [x_" << pw.i << ", x_" << pw.j
                       << "] has min N = " << pw.n_min << " (needs < 1); flat unit-sphere face";
                    throw std::invalid_argument(os.str());
                }
            }
        }
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            const double r = euclidean_norm(scaled(plan.sites.sites[i], plan.sites.scale));
            if (std::abs(r - 1.0) > 1e-6) {
                std::ostringstream os;
                os << "coexistence precondition failed: site " << i << " has |x| = " << r
                   << ", not on the Euclidean unit sphere";
                throw std::invalid_argument(os.str());
            }
        }
    }

    CoexistenceReport report;
    for (std::size_t ri = 0; ri < plan.scale_ladder.size(); ++ri) {
        const double R = plan.scale_ladder[ri];
        const auto g = stage_geometry(plan, R);
        const std::int64_t n_grid = static_cast<std::int64_t>(g.grid_coords.size());

        SiteConfiguration scaled_cfg;
        scaled_cfg.sites = g.scaled_sites;

        // shell of each site: deep interior of its own cell
        std::vector<std::vector<std::int64_t>> shells(k);
        for (std::int64_t gi = 0; gi < n_grid; ++gi) {
            for (std::size_t i = 0; i < k; ++i) {
                if (!voronoi_member(g.grid_coords[gi], i, scaled_cfg, norm)) continue;
                const double dist_to_source =
                    euclidean_norm(sub(g.grid_coords[gi], g.scaled_sites[i]));
                const double threshold =
                    plan.shell_factor * R *
                    euclidean_norm(scaled(plan.sites.sites[i], plan.sites.scale));
                if (dist_to_source >= threshold) shells[i].push_back(gi);
                break;  // cells are disjoint
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (shells[i].empty()) {
                std::ostringstream os;
                os << "coexistence: shell of site " << i << " is empty at R = " << R
                   << "; lower shell_factor or raise box_multiplier";
                throw std::invalid_argument(os.str());
            }
        }

        CoexistenceReport::Scale scale;
        scale.R = R;
        scale.n_reps = plan.n_reps;
        for (const auto& s : shells) scale.shell_sizes.push_back(static_cast<std::int64_t>(s.size()));
        scale.per_rep.assign(plan.n_reps, 0);

        for_each_index(exec, plan.n_reps, [&](std::int64_t rep) {
            const std::uint64_t rep_seed =
                hash_u64(hash_u64(hash_u64(plan.master_seed, 0x636f6578697374ULL), ri),
                         static_cast<std::uint64_t>(rep));
            std::vector<std::int32_t> winners;
            if (!plan.continuum) {
                const auto field = plan.lattice.field_for(g.box, rep_seed);
                const auto map = competing_territories(field, g.sources);
                winners.reserve(g.grid_points.size());
                for (const auto& p : g.grid_points) winners.push_back(map.winner_at(p));
            } else {
                const auto ev = plan.continuum_model.events_for(g.rbox, rep_seed);
                const EventGraphIndex index(ev);
                const auto terr = continuum_territories(index, g.scaled_sites, g.rgrid);
                winners.assign(terr.map.winner.begin(), terr.map.winner.end());
            }
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i) {
                bool occupied = false;
                for (const std::int64_t gi : shells[i]) {
                    if (winners[gi] == static_cast<std::int32_t>(i)) {
                        occupied = true;
                        break;
                    }
                }
                ok = occupied;
            }
            scale.per_rep[rep] = ok ? 1 : 0;
        });

        for (char c : scale.per_rep) scale.successes += c;
        scale.wilson = wilson_interval(scale.successes, plan.n_reps);
        report.scales.push_back(std::move(scale));
    }
    return report;
}

}  // namespace fpcomp
