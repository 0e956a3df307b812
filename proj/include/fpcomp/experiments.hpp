#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpcomp/continuum_fpp.hpp"
#include "fpcomp/models.hpp"
#include "fpcomp/norm.hpp"
#include "fpcomp/norm_estimation.hpp"
#include "fpcomp/parallel.hpp"
#include "fpcomp/stats.hpp"
#include "fpcomp/voronoi.hpp"

namespace fpcomp {

// A scale-ladder experiment over one of the two models: k competing seeds
// placed at R * x_i, replicated territories, densities measured against the
// Voronoi cells of the scaled sites over origin-centered balls.
struct ExperimentPlan {
    bool continuum = false;
    LatticeModel lattice;
    ContinuumModel continuum_model;

    SiteConfiguration sites;          // the unscaled pattern x_1..x_k
    bool sites_on_norm_sphere = false;

    std::vector<double> scale_ladder; // increasing R values
    int n_reps = 100;
    double epsilon = 0.15;
    double delta = 0.0;               // D_i^delta variant when nonzero

    double box_multiplier = 3.0;      // box halfwidth = 0.5 * m * max(R, site extent)
    double guard_factor = 0.5;        // measured points >= g * min source spacing from boundary
    double grid_pitch = 1.0;
    double shell_factor = 1.0;        // coexistence shell: |z - R x_i| >= f * R * |x_i|
    std::vector<double> radius_fractions = {0.4, 0.55, 0.7, 0.85, 1.0};
    double tail_window = 0.25;
    std::uint64_t master_seed = 1;

    void validate() const;  // throws std::invalid_argument with the offending field
};

// Per-scale working geometry: box, sources, measured grid, density radii.
struct StageGeometry {
    double R = 1.0;
    std::vector<std::vector<double>> scaled_sites;
    double min_spacing = 0.0;
    double guard_margin = 0.0;
    double rho_max = 0.0;
    std::vector<double> radii;

    // lattice
    IntBox box;
    std::vector<LatticePoint> sources;
    std::vector<LatticePoint> grid_points;

    // continuum
    RealBox rbox;
    RealGrid rgrid;

    // measured grid points as real coordinates (shared by both models)
    std::vector<std::vector<double>> grid_coords;
};

StageGeometry stage_geometry(const ExperimentPlan& plan, double R);

// Indices i with dens(V_i) > 0: by the segment criterion when the sites sit
// on the N-unit sphere, otherwise by direct density estimation.
std::vector<bool> positive_density_sites(const ExperimentPlan& plan, const Norm& norm,
                                         double threshold = 1e-3);

struct FacetA {
    std::vector<double> radii;
    std::vector<double> ratios;
    std::vector<std::int64_t> numerators, denominators;
    double lower = 0.0, upper = 0.0;
    std::int64_t fragile_points = 0;  // grid points with |p_hat - (1-eps)| <= SE
};

struct SiteScaleReport {
    int site = 0;
    bool in_i = false;
    FacetA facet_a;
    std::vector<double> rep_densities;  // facet (b): per-replicate box density
    double rep_density_mean = 0.0, rep_density_se = 0.0;
};

struct ScaleReport {
    double R = 0.0;
    double guard_margin = 0.0;
    double rho_max = 0.0;
    std::int64_t grid_points = 0;
    std::vector<SiteScaleReport> sites;
    double frac_reps_all_above = 0.0;  // facet (b): all i in I clear 1 - eps
    std::int64_t ties_observed = 0;
    std::int64_t unreached_observed = 0;
};

struct TheoremReport {
    std::vector<ScaleReport> scales;
    std::vector<double> spearman_lower;  // per site: trend of facet-a lower vs R
    std::vector<bool> in_i;
};

TheoremReport density_experiment(const ExperimentPlan& plan, const Norm& norm,
                                 Exec exec = Exec::openmp);

struct CoexistenceReport {
    struct Scale {
        double R = 0.0;
        int n_reps = 0;
        std::int64_t successes = 0;
        WilsonInterval wilson;
        std::vector<char> per_rep;
        std::vector<std::int64_t> shell_sizes;  // per site
    };
    std::vector<Scale> scales;
};

// Shell proxy for "every territory is infinite": each type must occupy a
// measured point deep in its own cell. Throws when the geometric
// precondition (unit-sphere sites, segment minima) fails.
CoexistenceReport coexistence_experiment(const ExperimentPlan& plan, const Norm& norm,
                                         Exec exec = Exec::openmp);

struct LineCompetitionConfig {
    std::vector<double> x;   // competition direction vector (e.g. 32 e1)
    double lambda = 8.0;
    double epsilon = 0.2;
    int n_reps = 200;
    int alpha_points = 21;
    double n_of_x = 0.0;     // N(x), from a norm estimate
    std::uint64_t seed = 1;
};

struct LineCompetitionReport {
    std::vector<double> alphas;
    std::vector<double> p_hat;           // P(T(-x,ax) - T(0,ax) >= (1-eps) N(x))
    std::vector<double> mean_gap_ratio;  // E(T(-x,ax) - T(0,ax)) / N(x)
    double passing_fraction = 0.0;       // fraction of alphas with p_hat >= 1 - eps
    std::int64_t upper_bound_violations = 0;  // exact: gap <= T(-x, 0)
    double n_of_x = 0.0;
};

LineCompetitionReport line_competition_experiment(const LatticeModel& model,
                                                  const LineCompetitionConfig& cfg,
                                                  Exec exec = Exec::openmp);
LineCompetitionReport line_competition_experiment(const ContinuumModel& model,
                                                  const LineCompetitionConfig& cfg,
                                                  Exec exec = Exec::openmp);

struct AssumptionAudit {
    struct Item {
        std::string name;
        bool pass = false;
        std::string evidence;
    };
    std::vector<Item> items;

    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
};

AssumptionAudit assumption_audit(const LatticeModel& model, std::int64_t n_samples,
                                 std::uint64_t seed, Exec exec = Exec::openmp);
AssumptionAudit assumption_audit(const ContinuumModel& model, std::int64_t n_samples,
                                 std::uint64_t seed, Exec exec = Exec::openmp);

}  // namespace fpcomp
