#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpcomp/experiments.hpp"
#include "fpcomp/lattice_fpp.hpp"
#include "fpcomp/rng.hpp"

namespace fpcomp {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

AssumptionAudit::Item ks_item(const std::string& name, const std::vector<KsResult>& results,
                              double p_threshold = 0.01, double pass_fraction = 0.9) {
    std::int64_t above = 0;
    for (const auto& r : results)
        if (r.p_value > p_threshold) ++above;
    AssumptionAudit::Item item;
    item.name = name;
    item.pass =
        static_cast<double>(above) >= pass_fraction * static_cast<double>(results.size());
    std::ostringstream os;
    os << above << "/" << results.size() << " comparisons with p > " << p_threshold;
    item.evidence = os.str();
    return item;
}

}  // namespace

AssumptionAudit assumption_audit(const LatticeModel& model, std::int64_t n_samples,
                                 std::uint64_t seed, Exec exec) {
    AssumptionAudit audit;
    const int d = model.dim;

    // nonnegativity, triangle, symmetry: exact checks over sampled tuples on
    // replicated fields
    {
        const IntBox box = IntBox::cube(d, -10, 10);
        std::vector<LatticePoint> pts;
        for (std::int64_t x = -4; x <= 4; x += 2)
            for (std::int64_t y = -4; y <= 4; y += 2) pts.push_back(LatticePoint{x, y});
        const std::int64_t triples_per_field =
            static_cast<std::int64_t>(pts.size() * pts.size() * pts.size());
        const std::int64_t n_fields =
            std::max<std::int64_t>(1, (n_samples + triples_per_field - 1) / triples_per_field);
        std::vector<std::int64_t> neg_v(n_fields, 0), tri_v(n_fields, 0), sym_v(n_fields, 0),
            sampled(n_fields, 0);
        for_each_index(exec, n_fields, [&](std::int64_t f) {
            const auto field = model.field_for(
                box, hash_u64(hash_u64(seed, 0x617564697431ULL), static_cast<std::uint64_t>(f)));
            std::vector<std::vector<double>> times;
            for (const auto& p : pts) times.push_back(first_passage_time(field, p));
            const auto t = [&](std::size_t i, std::size_t j) {
                return times[i][box.index_of(pts[j])];
            };
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    if (t(i, j) < 0.0) ++neg_v[f];
                    if (t(i, j) != t(j, i)) ++sym_v[f];
                    for (std::size_t l = 0; l < pts.size(); ++l) {
                        ++sampled[f];
                        if (t(i, l) > t(i, j) + t(j, l)) ++tri_v[f];
                    }
                }
            }
        });
        std::int64_t neg = 0, tri = 0, sym = 0, total = 0;
        for (std::int64_t f = 0; f < n_fields; ++f) {
            neg += neg_v[f];
            tri += tri_v[f];
            sym += sym_v[f];
            total += sampled[f];
        }
        audit.items.push_back({"nonnegativity", neg == 0,
                               fmt(static_cast<double>(total)) + " tuples, " +
                                   fmt(static_cast<double>(neg)) + " violations"});
        audit.items.push_back({"triangle inequality", tri == 0,
                               fmt(static_cast<double>(total)) + " triples, " +
                                   fmt(static_cast<double>(tri)) + " violations"});
        audit.items.push_back({"symmetry T(x,y) = T(y,x)", sym == 0,
                               fmt(static_cast<double>(total)) + " pairs, " +
                                   fmt(static_cast<double>(sym)) + " violations"});
    }

    // Lambda finite (with the Lemma-style pair bound)
    {
        const auto lam = lambda_estimate(model, 16, hash_u64(seed, 0x617564697432ULL), 0.25, exec);
        AssumptionAudit::Item item;
        item.name = "Lambda finite";
        item.pass = std::isfinite(lam.lambda_hat) && lam.lambda_hat > 0.0 && lam.audit_ok;
        item.evidence = "Lambda_hat = " + fmt(lam.lambda_hat) + " (se " + fmt(lam.se) +
                        "), pair bound " + (lam.audit_ok ? "holds" : "violated");
        audit.items.push_back(std::move(item));
    }

    // stationarity: KS of T(0, x0) against integer translations
    {
        const int n_shifts = 20;
        const int reps = 150;
        const LatticePoint x0 = {7, 3};
        const auto sample_at = [&](const LatticePoint& z, std::uint64_t s) {
            std::vector<double> out(reps);
            LatticePoint target = {z[0] + x0[0], z[1] + x0[1]};
            std::vector<LatticePoint> hull = {z, target};
            const IntBox box = IntBox::hull(hull, 8);
            for_each_index(exec, reps, [&](std::int64_t r) {
                const auto field =
                    model.field_for(box, hash_u64(s, static_cast<std::uint64_t>(r)));
                out[r] = first_passage_time(field, z, target);
            });
            return out;
        };
        const auto base = sample_at(LatticePoint{0, 0}, hash_u64(seed, 0x617564697433ULL));
        Rng rng(hash_u64(seed, 0x617564697434ULL));
        std::vector<KsResult> results;
        for (int s = 0; s < n_shifts; ++s) {
            const LatticePoint z = {static_cast<std::int64_t>(rng.next_uniform(-40, 40)),
                                    static_cast<std::int64_t>(rng.next_uniform(-40, 40))};
            const auto shifted = sample_at(z, hash_u64(seed, 0x9100 + s));
            results.push_back(ks_two_sample(base, shifted));
        }
        audit.items.push_back(ks_item("stationarity (translations)", results));
    }

    // convergence: subadditive ratio curve decreasing toward a positive limit
    {
        const auto s = directional_time_constant(model, std::vector<double>{1.0, 0.0}, 12, 4.0, 32,
                                                 hash_u64(seed, 0x617564697435ULL), exec);
        const auto king = kingman_diagnostics(s);
        AssumptionAudit::Item item;
        item.name = "convergence T(0,x)/N(x) -> 1";
        item.pass = king.ratio_nonincreasing && king.split_violations == 0 &&
                    s.a_hat > 3.0 * s.a_se;
        item.evidence = "a_hat = " + fmt(s.a_hat) + " (se " + fmt(s.a_se) + "), gamma_hat = " +
                        fmt(s.gamma_hat) + ", ratio curve " +
                        (king.ratio_nonincreasing ? "non-increasing" : "increasing somewhere");
        audit.items.push_back(std::move(item));
    }
    return audit;
}

AssumptionAudit assumption_audit(const ContinuumModel& model, std::int64_t n_samples,
                                 std::uint64_t seed, Exec exec) {
    AssumptionAudit audit;
    const int d = model.dim;

    // nonnegativity and the set triangle inequality on disjoint ball triples
    {
        const RealBox box = RealBox::cube(d, -10.0, 10.0);
        const std::int64_t n_fields = std::max<std::int64_t>(1, n_samples / 400);
        std::vector<std::int64_t> neg_v(n_fields, 0), tri_v(n_fields, 0), sampled(n_fields, 0);
        for_each_index(exec, n_fields, [&](std::int64_t f) {
            const auto ev = model.events_for(
                box, hash_u64(hash_u64(seed, 0x617564697436ULL), static_cast<std::uint64_t>(f)));
            const EventGraphIndex index(ev);
            const std::vector<double> ca = {-5.0, 0.0}, cc = {0.0, 0.0}, cd = {5.0, 0.0};
            SourceRegion a, c;
            a.centers.push_back(ca);
            c.centers.push_back(cc);
            const ContinuumTimes from_a(index, a);
            const ContinuumTimes from_c(index, c);
            const double t_ac = from_a.ball_time(cc, 1.0, model.mesh_pitch).time;
            // evaluation points of D: its mesh plus its event centers
            std::vector<std::vector<double>> dpts;
            for (std::int64_t e : index.events_in_ball(cd, 1.0))
                dpts.push_back(std::vector<double>(ev.center(e).begin(), ev.center(e).end()));
            for (double dx = -1.0; dx <= 1.0; dx += 0.5)
                for (double dy = -1.0; dy <= 1.0; dy += 0.5)
                    if (dx * dx + dy * dy <= 1.0) dpts.push_back({cd[0] + dx, cd[1] + dy});
            for (const auto& p : dpts) {
                ++sampled[f];
                const double lhs = from_a.at(p).time;
                const double rhs = t_ac + from_c.at(p).time;
                if (lhs < 0.0) ++neg_v[f];
                if (!std::isinf(lhs) && !std::isinf(rhs) && lhs > rhs) ++tri_v[f];
            }
        });
        std::int64_t neg = 0, tri = 0, total = 0;
        for (std::int64_t f = 0; f < n_fields; ++f) {
            neg += neg_v[f];
            tri += tri_v[f];
            total += sampled[f];
        }
        audit.items.push_back({"nonnegativity", neg == 0,
                               fmt(static_cast<double>(total)) + " values, " +
                                   fmt(static_cast<double>(neg)) + " violations"});
        audit.items.push_back({"triangle inequality (sets)", tri == 0,
                               fmt(static_cast<double>(total)) + " point checks, " +
                                   fmt(static_cast<double>(tri)) + " violations"});
    }

    {
        const auto lam = lambda_estimate(model, 12, hash_u64(seed, 0x617564697437ULL), 0.5, exec);
        AssumptionAudit::Item item;
        item.name = "Lambda finite";
        item.pass = std::isfinite(lam.lambda_hat) && lam.lambda_hat > 0.0 && lam.audit_ok;
        item.evidence = "Lambda_hat = " + fmt(lam.lambda_hat) + " (se " + fmt(lam.se) +
                        "), pair bound " + (lam.audit_ok ? "holds" : "violated");
        audit.items.push_back(std::move(item));
    }

    // stationarity across real translations and isotropy across rotations of
    // T(0, x) = T(B, x + B)
    {
        const int n_comparisons = 20;
        const int reps = 120;
        const double dist = 6.0;
        const auto sample_pair = [&](std::span<const double> from, std::span<const double> to,
                                     std::uint64_t s) {
            RealBox box;
            box.lo.resize(d);
            box.hi.resize(d);
            for (int a = 0; a < d; ++a) {
                box.lo[a] = std::min(from[a], to[a]) - model.pad - 1.0;
                box.hi[a] = std::max(from[a], to[a]) + model.pad + 1.0;
            }
            std::vector<double> out(reps);
            for_each_index(exec, reps, [&](std::int64_t r) {
                const auto ev = model.events_for(box, hash_u64(s, static_cast<std::uint64_t>(r)));
                const EventGraphIndex index(ev);
                SourceRegion src;
                src.centers.push_back(std::vector<double>(from.begin(), from.end()));
                const ContinuumTimes t(index, src);
                const auto bt = t.ball_time(to, 1.0, model.mesh_pitch);
                out[r] = bt.truncated ? kInfiniteTime : bt.time;
            });
            return out;
        };
        const std::vector<double> origin(d, 0.0);
        std::vector<double> x0(d, 0.0);
        x0[0] = dist;
        const auto base = sample_pair(origin, x0, hash_u64(seed, 0x617564697438ULL));

        Rng rng(hash_u64(seed, 0x617564697439ULL));
        std::vector<KsResult> trans, rot;
        for (int s = 0; s < n_comparisons; ++s) {
            std::vector<double> z(d);
            rng.next_in_ball(20.0, z);
            const auto shifted = sample_pair(z, add(z, x0), hash_u64(seed, 0x9200 + s));
            trans.push_back(ks_two_sample(base, shifted));

            std::vector<double> u(d);
            rng.next_unit_vector(u);
            const auto rotated =
                sample_pair(origin, scaled(u, dist), hash_u64(seed, 0x9300 + s));
            rot.push_back(ks_two_sample(base, rotated));
        }
        audit.items.push_back(ks_item("stationarity (translations)", trans));
        audit.items.push_back(ks_item("isotropy (rotations)", rot));
    }

    {
        const auto s = directional_time_constant(model, std::vector<double>{1.0, 0.0}, 5, 3.0, 24,
                                                 hash_u64(seed, 0x61756469743aULL), exec);
        const auto king = kingman_diagnostics(s);
        AssumptionAudit::Item item;
        item.name = "convergence T(0,x)/N(x) -> 1";
        item.pass = king.ratio_nonincreasing && king.split_violations == 0 &&
                    s.a_hat > 3.0 * s.a_se;
        item.evidence = "mu_hat = " + fmt(s.a_hat) + " (se " + fmt(s.a_se) + "), gamma_hat = " +
                        fmt(s.gamma_hat);
        audit.items.push_back(std::move(item));
    }
    return audit;
}

}  // namespace fpcomp
