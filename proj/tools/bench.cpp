// Serial vs OpenMP timings for the replicate/sample fan-out kernels. The
// parallel kernels are required to be bit-identical to the serial ones (the
// reduction order is fixed by slot indexing), so each benchmark also checks
// equality of the results it timed.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "fpcomp/density.hpp"
#include "fpcomp/experiments.hpp"
#include "fpcomp/norm_estimation.hpp"

using namespace fpcomp;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0;
}

void row(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-34s serial %9.1f ms   openmp %9.1f ms   speedup %5.2fx   %s\n", name.c_str(),
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("workers available: %d\n\n", worker_count());

    {
        const SetPredicate c = [](std::span<const double> z) { return z[0] + z[1] > 0.2; };
        const SetPredicate d = [](std::span<const double> z) { return z[0] < 4.0; };
        DensityEstimatorConfig cfg;
        cfg.samples = 2000000;
        cfg.seed = 5;
        DensityReport a, b;
        cfg.exec = Exec::serial;
        const double ts = time_ms([&] { a = relative_density(c, d, 2, {5.0, 10.0}, cfg); });
        cfg.exec = Exec::openmp;
        const double tp = time_ms([&] { b = relative_density(c, d, 2, {5.0, 10.0}, cfg); });
        bool same = a.rows.size() == b.rows.size();
        for (std::size_t i = 0; same && i < a.rows.size(); ++i)
            same = a.rows[i].ratio == b.rows[i].ratio && a.rows[i].d_hits == b.rows[i].d_hits;
        row("monte carlo relative density", ts, tp, same);
    }

    {
        LatticeModel model;
        model.weights = EdgeWeightDistribution::exponential(1.0);
        DirectionalSample a, b;
        const std::vector<double> u = {1.0, 0.0};
        const double ts = time_ms(
            [&] { a = directional_time_constant(model, u, 12, 8.0, 48, 7, Exec::serial); });
        const double tp = time_ms(
            [&] { b = directional_time_constant(model, u, 12, 8.0, 48, 7, Exec::openmp); });
        row("lattice replicate batch", ts, tp, a.times == b.times && a.a_hat == b.a_hat);
    }

    {
        ContinuumModel model;
        model.law = RadiusLaw::constant(1.0);
        model.t_cap = 40.0;
        model.mesh_pitch = 0.2;
        DirectionalSample a, b;
        const std::vector<double> u = {1.0, 0.0};
        const double ts = time_ms(
            [&] { a = directional_time_constant(model, u, 5, 3.0, 24, 9, Exec::serial); });
        const double tp = time_ms(
            [&] { b = directional_time_constant(model, u, 5, 3.0, 24, 9, Exec::openmp); });
        row("continuum replicate batch", ts, tp, a.times == b.times && a.a_hat == b.a_hat);
    }

    {
        ExperimentPlan plan;
        plan.lattice.weights = EdgeWeightDistribution::exponential(1.0);
        plan.sites.sites = {{-1.0, 0.0}, {1.0, 0.0}};
        plan.scale_ladder = {16.0};
        plan.n_reps = 48;
        plan.epsilon = 0.2;
        plan.master_seed = 3;
        TheoremReport a, b;
        const auto norm = Norm::l2(2);
        const double ts = time_ms([&] { a = density_experiment(plan, norm, Exec::serial); });
        const double tp = time_ms([&] { b = density_experiment(plan, norm, Exec::openmp); });
        bool same = a.scales.size() == b.scales.size();
        for (std::size_t s = 0; same && s < a.scales.size(); ++s) {
            same = a.scales[s].frac_reps_all_above == b.scales[s].frac_reps_all_above;
            for (std::size_t i = 0; same && i < a.scales[s].sites.size(); ++i)
                same = a.scales[s].sites[i].facet_a.ratios == b.scales[s].sites[i].facet_a.ratios;
        }
        row("lattice density experiment", ts, tp, same);
    }

    return 0;
}
