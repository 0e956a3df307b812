#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpcomp/experiments.hpp"
#include "fpcomp/lattice_fpp.hpp"
#include "fpcomp/rng.hpp"

namespace fpcomp {

namespace {

void validate_line_config(const LineCompetitionConfig& cfg) {
    if (cfg.x.size() < 2) throw std::invalid_argument("line experiment: x must have d >= 2");
    if (euclidean_norm(cfg.x) == 0.0)
        throw std::invalid_argument("line experiment: x must be nonzero");
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("line experiment: lambda must be > 0");
    if (cfg.alpha_points < 2)
        throw std::invalid_argument("line experiment: need at least 2 alpha grid points");
    if (cfg.n_reps < 2) throw std::invalid_argument("line experiment: n_reps >= 2 required");
    if (!(cfg.n_of_x > 0.0))
        throw std::invalid_argument("line experiment: N(x) unavailable (must be positive)");
}

std::vector<double> alpha_grid(const LineCompetitionConfig& cfg) {
    std::vector<double> alphas;
    for (int i = 0; i < cfg.alpha_points; ++i)
        alphas.push_back(cfg.lambda * static_cast<double>(i) /
                         static_cast<double>(cfg.alpha_points - 1));
    return alphas;
}

LineCompetitionReport finalize(const LineCompetitionConfig& cfg,
                               const std::vector<double>& alphas,
                               const std::vector<std::vector<double>>& gaps,
                               std::int64_t upper_violations) {
    LineCompetitionReport rep;
    rep.alphas = alphas;
    rep.n_of_x = cfg.n_of_x;
    rep.upper_bound_violations = upper_violations;
    const double threshold = (1.0 - cfg.epsilon) * cfg.n_of_x;
    std::int64_t passing = 0;
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        std::int64_t hits = 0;
        double sum = 0.0;
        for (double gap : gaps[ai]) {
            if (gap >= threshold) ++hits;
            sum += gap;
        }
        const double p = static_cast<double>(hits) / static_cast<double>(cfg.n_reps);
        rep.p_hat.push_back(p);
        rep.mean_gap_ratio.push_back(sum / static_cast<double>(cfg.n_reps) / cfg.n_of_x);
        if (p >= 1.0 - cfg.epsilon) ++passing;
    }
    rep.passing_fraction = static_cast<double>(passing) / static_cast<double>(alphas.size());
    return rep;
}

}  // namespace

LineCompetitionReport line_competition_experiment(const LatticeModel& model,
                                                  const LineCompetitionConfig& cfg, Exec exec) {
    validate_line_config(cfg);
    const auto alphas = alpha_grid(cfg);
    const int d = static_cast<int>(cfg.x.size());

    const auto src_neg = psi_round(scaled(cfg.x, -1.0));
    const LatticePoint src_zero(d, 0);
    std::vector<LatticePoint> targets;
    for (const double a : alphas) targets.push_back(psi_round(scaled(cfg.x, a)));

    // corridor box: sources and targets plus wander room on every side
    std::vector<LatticePoint> pts = {src_neg, src_zero};
    pts.insert(pts.end(), targets.begin(), targets.end());
    const double len = (1.0 + cfg.lambda) * euclidean_norm(cfg.x);
    const auto pad = static_cast<std::int64_t>(
        std::ceil(std::max(0.5 * euclidean_norm(cfg.x), 0.25 * len)));
    const IntBox box = IntBox::hull(pts, pad);

    std::vector<std::vector<double>> gaps(alphas.size(), std::vector<double>(cfg.n_reps, 0.0));
    std::vector<std::int64_t> violations(cfg.n_reps, 0);
    for_each_index(exec, cfg.n_reps, [&](std::int64_t rep) {
        const auto field = model.field_for(
            box, hash_u64(hash_u64(cfg.seed, 0x6c696e65657870ULL), static_cast<std::uint64_t>(rep)));
        const auto from_neg = first_passage_time(field, src_neg);
        const auto from_zero = first_passage_time(field, src_zero);
        const double bound = from_neg[box.index_of(src_zero)];  // T(-x, 0)
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const auto idx = box.index_of(targets[ai]);
            const double gap = from_neg[idx] - from_zero[idx];
            gaps[ai][rep] = gap;
            if (gap > bound) ++violations[rep];  // exact triangle audit
        }
    });

    std::int64_t total_violations = 0;
    for (const auto v : violations) total_violations += v;
    return finalize(cfg, alphas, gaps, total_violations);
}

LineCompetitionReport line_competition_experiment(const ContinuumModel& model,
                                                  const LineCompetitionConfig& cfg, Exec exec) {
    validate_line_config(cfg);
    const auto alphas = alpha_grid(cfg);
    const int d = static_cast<int>(cfg.x.size());

    const auto neg = scaled(cfg.x, -1.0);
    const std::vector<double> zero(d, 0.0);
    std::vector<std::vector<double>> targets;
    for (const double a : alphas) targets.push_back(scaled(cfg.x, a));

    RealBox box;
    box.lo.resize(d);
    box.hi.resize(d);
    const double len = (1.0 + cfg.lambda) * euclidean_norm(cfg.x);
    const double pad = std::max({model.pad, 0.5 * euclidean_norm(cfg.x), 0.25 * len}) + 1.0;
    for (int a = 0; a < d; ++a) {
        double lo = std::min({neg[a], zero[a], targets.back()[a]});
        double hi = std::max({neg[a], zero[a], targets.back()[a]});
        box.lo[a] = lo - pad;
        box.hi[a] = hi + pad;
    }

    std::vector<std::vector<double>> gaps(alphas.size(), std::vector<double>(cfg.n_reps, 0.0));
    std::vector<std::int64_t> violations(cfg.n_reps, 0);
    for_each_index(exec, cfg.n_reps, [&](std::int64_t rep) {
        const auto ev = model.events_for(
            box, hash_u64(hash_u64(cfg.seed, 0x6c696e65637470ULL), static_cast<std::uint64_t>(rep)));
        const EventGraphIndex index(ev);
        SourceRegion a_neg, a_zero;
        a_neg.centers.push_back(neg);
        a_zero.centers.push_back(zero);
        const ContinuumTimes from_neg(index, a_neg);
        const ContinuumTimes from_zero(index, a_zero);
        const double bound = from_neg.ball_time(zero, 1.0, model.mesh_pitch).time;
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const double tn = from_neg.ball_time(targets[ai], 1.0, model.mesh_pitch).time;
            const double tz = from_zero.ball_time(targets[ai], 1.0, model.mesh_pitch).time;
            const double gap = tn - tz;
            gaps[ai][rep] = gap;
            if (gap > bound) ++violations[rep];
        }
    });

    std::int64_t total_violations = 0;
    for (const auto v : violations) total_violations += v;
    return finalize(cfg, alphas, gaps, total_violations);
}

}  // namespace fpcomp
