#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fpcomp/experiments.hpp"
#include "fpcomp/lattice_fpp.hpp"

using namespace fpcomp;

namespace {

ExperimentPlan antipodal_lattice_plan(EdgeWeightDistribution weights) {
    ExperimentPlan plan;
    plan.lattice.weights = std::move(weights);
    plan.sites.sites = {{-1.0, 0.0}, {1.0, 0.0}};
    plan.scale_ladder = {8.0};
    plan.n_reps = 4;
    plan.epsilon = 0.2;
    plan.master_seed = 11;
    return plan;
}

}  // namespace

TEST_CASE("plan validation catches bad inputs") {
    ExperimentPlan plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    plan.sites.sites = {{1.0, 0.0}};  // k = 1
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    plan.scale_ladder = {8.0, 8.0};
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    plan.epsilon = 1.5;
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
}

TEST_CASE("stage geometry: boxes, guard margins, measured grid") {
    const auto plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    const auto g = stage_geometry(plan, 8.0);
    // halfwidth = 0.5 * 3 * max(R, extent) = 12, guard = 0.5 * 16 = 8
    CHECK(g.box.lo == std::vector<std::int64_t>{-12, -12});
    CHECK(g.box.hi == std::vector<std::int64_t>{12, 12});
    CHECK(g.guard_margin == doctest::Approx(8.0));
    CHECK(g.rho_max == doctest::Approx(4.0));
    CHECK(g.sources[0] == LatticePoint{-8, 0});
    CHECK(g.sources[1] == LatticePoint{8, 0});
    CHECK(g.grid_points.size() == 9 * 9);
    // psi collision when the scale is too small to separate the sites
    CHECK_THROWS_AS(stage_geometry(plan, 0.2), std::invalid_argument);
}

TEST_CASE("positive-density site set via the segment criterion") {
    ExperimentPlan plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    plan.sites_on_norm_sphere = true;
    const auto in_i = positive_density_sites(plan, Norm::l1(2));
    CHECK(in_i == std::vector<bool>{true, true});
    // direct estimation route (sites not declared on the sphere)
    plan.sites_on_norm_sphere = false;
    const auto direct = positive_density_sites(plan, Norm::l1(2));
    CHECK(direct == std::vector<bool>{true, true});
}

TEST_CASE("density experiment: deterministic model matches its own norm exactly") {
    ExperimentPlan plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    plan.n_reps = 3;
    const auto report = density_experiment(plan, Norm::l1(2), Exec::serial);
    REQUIRE(report.scales.size() == 1);
    const auto& scale = report.scales[0];
    CHECK(scale.frac_reps_all_above == 1.0);
    for (const auto& site : scale.sites) {
        CHECK(site.in_i);
        for (double r : site.facet_a.ratios) CHECK(r == 1.0);
        CHECK(site.facet_a.lower == 1.0);
        CHECK(site.facet_a.upper == 1.0);
        for (double d : site.rep_densities) CHECK(d == 1.0);
    }
    CHECK(scale.unreached_observed == 0);
}

TEST_CASE("density experiment: exponential weights, structural sanity") {
    ExperimentPlan plan = antipodal_lattice_plan(EdgeWeightDistribution::exponential(1.0));
    plan.scale_ladder = {8.0, 16.0};
    plan.n_reps = 16;
    plan.epsilon = 0.3;
    const auto report = density_experiment(plan, Norm::l2(2));
    REQUIRE(report.scales.size() == 2);
    for (const auto& scale : report.scales) {
        CHECK(scale.ties_observed == 0);  // atomless weights
        CHECK(scale.unreached_observed == 0);
        for (const auto& site : scale.sites) {
            CHECK(site.in_i);
            for (double r : site.facet_a.ratios) {
                CHECK(r >= 0.0);
                CHECK(r <= 1.0);
            }
            CHECK(site.facet_a.lower <= site.facet_a.upper);
            CHECK(site.rep_density_mean > 0.5);  // each cell mostly keeps its half
        }
        CHECK(scale.frac_reps_all_above >= 0.0);
        CHECK(scale.frac_reps_all_above <= 1.0);
    }
    CHECK(report.spearman_lower.size() == 2);
}

TEST_CASE("density experiment: delta variant is monotone per realization") {
    const auto plan = antipodal_lattice_plan(EdgeWeightDistribution::exponential(1.0));
    const auto g = stage_geometry(plan, 8.0);
    const auto field = plan.lattice.field_for(g.box, 77);
    const auto map = competing_territories(field, g.sources, true);
    const auto w0 = delta_winners(map, 0.0);
    const auto w1 = delta_winners(map, 0.5);
    const auto w2 = delta_winners(map, 1.0);
    for (std::int64_t z = 0; z < g.box.size(); ++z) {
        if (w2[z] >= 0) CHECK(w1[z] == w2[z]);  // delta-winner survives shrinking delta
        if (w1[z] >= 0) CHECK(w0[z] == w1[z]);
    }
    // delta = 0 coincides with the strict winner map
    const auto strict = competing_territories(field, g.sources);
    CHECK(w0 == strict.winner);
}

TEST_CASE("density experiment: continuum smoke run") {
    ExperimentPlan plan;
    plan.continuum = true;
    plan.continuum_model.law = RadiusLaw::constant(1.0);
    plan.continuum_model.t_cap = 40.0;
    plan.continuum_model.mesh_pitch = 0.25;
    plan.sites.sites = {{-1.0, 0.0}, {1.0, 0.0}};
    plan.scale_ladder = {6.0};
    plan.n_reps = 6;
    plan.epsilon = 0.4;
    plan.grid_pitch = 0.75;
    plan.master_seed = 5;
    const auto report = density_experiment(plan, Norm::l2(2));
    REQUIRE(report.scales.size() == 1);
    for (const auto& site : report.scales[0].sites) {
        CHECK(site.in_i);
        for (double r : site.facet_a.ratios) {
            if (!std::isnan(r)) {
                CHECK(r >= 0.0);
                CHECK(r <= 1.0);
            }
        }
    }
}

TEST_CASE("coexistence: deterministic antipodal run is certain") {
    ExperimentPlan plan = antipodal_lattice_plan(EdgeWeightDistribution::constant(1.0));
    plan.sites_on_norm_sphere = true;
    plan.scale_ladder = {8.0, 16.0};
    plan.n_reps = 5;
    const auto rep = coexistence_experiment(plan, Norm::l1(2), Exec::serial);
    REQUIRE(rep.scales.size() == 2);
    for (const auto& s : rep.scales) {
        CHECK(s.successes == s.n_reps);
        CHECK(s.wilson.p_hat == 1.0);
        for (auto sz : s.shell_sizes) CHECK(sz > 0);
    }
}

TEST_CASE("coexistence: flat l1 face is rejected at the precondition") {
    ExperimentPlan plan;
    plan.lattice.weights = EdgeWeightDistribution::exponential(1.0);
    plan.sites.sites = {{1.0, 0.0}, {0.0, 1.0}};  // flat face of the l1 sphere
    plan.sites_on_norm_sphere = true;
    plan.scale_ladder = {8.0};
    plan.n_reps = 2;
    CHECK_THROWS_WITH_AS(coexistence_experiment(plan, Norm::l1(2)),
                         doctest::Contains("segment"), std::invalid_argument);
}

TEST_CASE("coexistence proxy is monotone in the shell factor per realization") {
    ExperimentPlan tight = antipodal_lattice_plan(EdgeWeightDistribution::exponential(1.0));
    tight.sites_on_norm_sphere = true;
    tight.scale_ladder = {10.0};
    tight.n_reps = 30;
    tight.shell_factor = 1.0;
    ExperimentPlan loose = tight;
    loose.shell_factor = 0.6;
    const auto norm = Norm::l1(2);
    const auto rep_tight = coexistence_experiment(tight, norm);
    const auto rep_loose = coexistence_experiment(loose, norm);
    for (int r = 0; r < tight.n_reps; ++r) {
        if (rep_tight.scales[0].per_rep[r]) CHECK(rep_loose.scales[0].per_rep[r]);
    }
    CHECK(rep_loose.scales[0].successes >= rep_tight.scales[0].successes);
}

TEST_CASE("line competition: deterministic additivity along a coordinate line") {
    LineCompetitionConfig cfg;
    cfg.x = {8.0, 0.0};
    cfg.lambda = 3.0;
    cfg.epsilon = 0.1;
    cfg.n_reps = 3;
    cfg.alpha_points = 7;
    cfg.n_of_x = 8.0;  // c * l1 norm of x
    cfg.seed = 3;
    LatticeModel model;
    model.weights = EdgeWeightDistribution::constant(1.0);
    const auto rep = line_competition_experiment(model, cfg, Exec::serial);
    CHECK(rep.passing_fraction == 1.0);
    CHECK(rep.upper_bound_violations == 0);
    for (double p : rep.p_hat) CHECK(p == 1.0);
    for (double g : rep.mean_gap_ratio) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("line competition: exponential weights, exact upper bound audit") {
    LineCompetitionConfig cfg;
    cfg.x = {8.0, 0.0};
    cfg.lambda = 2.0;
    cfg.epsilon = 0.3;
    cfg.n_reps = 40;
    cfg.alpha_points = 9;
    cfg.n_of_x = 0.4166 * 8.0;
    cfg.seed = 9;
    LatticeModel model;
    model.weights = EdgeWeightDistribution::exponential(1.0);
    const auto rep = line_competition_experiment(model, cfg);
    CHECK(rep.upper_bound_violations == 0);  // T(-x,ax) - T(0,ax) <= T(-x,0) exactly
    CHECK(rep.p_hat.size() == 9);
    for (double p : rep.p_hat) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK_THROWS_AS(line_competition_experiment(
                        model, LineCompetitionConfig{.x = {8.0, 0.0}, .n_of_x = 0.0}, Exec::serial),
                    std::invalid_argument);
}

TEST_CASE("line competition: continuum variant with ball-set times") {
    LineCompetitionConfig cfg;
    cfg.x = {6.0, 0.0};
    cfg.lambda = 1.5;
    cfg.epsilon = 0.4;
    cfg.n_reps = 8;
    cfg.alpha_points = 4;
    cfg.n_of_x = 1.2 * 6.0;  // rough mu for the constant-radius law
    cfg.seed = 31;
    ContinuumModel model;
    model.law = RadiusLaw::constant(1.0);
    model.t_cap = 40.0;
    model.mesh_pitch = 0.25;
    const auto rep = line_competition_experiment(model, cfg);
    CHECK(rep.upper_bound_violations == 0);  // exact via event-center inclusive sups
    CHECK(rep.alphas.size() == 4);
    for (double p : rep.p_hat) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("assumption audit: lattice exponential model passes everything") {
    LatticeModel model;
    model.weights = EdgeWeightDistribution::exponential(1.0);
    const auto audit = assumption_audit(model, 10000, 21);
    for (const auto& item : audit.items) {
        INFO(item.name, ": ", item.evidence);
        CHECK(item.pass);
    }
    CHECK(audit.all_pass());
    CHECK(audit.items.size() == 6);
}

TEST_CASE("assumption audit: continuum constant-radius model passes everything") {
    ContinuumModel model;
    model.law = RadiusLaw::constant(1.0);
    model.t_cap = 25.0;
    model.pad = 4.0;
    model.mesh_pitch = 0.25;
    const auto audit = assumption_audit(model, 4000, 22);
    for (const auto& item : audit.items) {
        INFO(item.name, ": ", item.evidence);
        CHECK(item.pass);
    }
    CHECK(audit.all_pass());
}
