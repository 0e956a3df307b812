#include "fpcomp/norm_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fpcomp/continuum_fpp.hpp"
#include "fpcomp/event_graph.hpp"
#include "fpcomp/lattice_fpp.hpp"
#include "fpcomp/rng.hpp"
#include "fpcomp/stats.hpp"

namespace fpcomp {

namespace {

// Snap a direction to a small integer lattice vector when one exists, so
// constant-weight runs hit exact lattice targets and have zero variance.
bool snap_to_lattice_vector(std::span<const double> u, LatticePoint& v) {
    double max_abs = 0.0;
    for (double c : u) max_abs = std::max(max_abs, std::abs(c));
    if (max_abs == 0.0) return false;
    for (int m = 1; m <= 12; ++m) {
        // scale so the largest component becomes the integer m
        const double lambda = static_cast<double>(m) / max_abs;
        bool ok = true;
        LatticePoint cand(u.size());
        for (std::size_t a = 0; a < u.size() && ok; ++a) {
            const double scaled = u[a] * lambda;
            const double r = std::round(scaled);
            ok = std::abs(scaled - r) < 1e-9;
            cand[a] = static_cast<std::int64_t>(r);
        }
        if (ok) {
            v = std::move(cand);
            return true;
        }
    }
    return false;
}

void finalize_sample(DirectionalSample& s) {
    const int kmax = s.k_max;
    s.ratio_mean.resize(kmax);
    s.ratio_se.resize(kmax);
    for (int k = 0; k < kmax; ++k) {
        std::vector<double> ratios;
        std::int64_t truncated = 0;
        for (double t : s.times[k]) {
            if (std::isinf(t))
                ++truncated;
            else
                ratios.push_back(t / s.distances[k]);
        }
        if (static_cast<double>(truncated) > 0.01 * static_cast<double>(s.n_reps)) {
            std::ostringstream os;
            os << "directional_time_constant: " << truncated << "/" << s.n_reps
               << " replicates truncated at distance " << s.distances[k]
               << " (limit 1%); enlarge the window";
            throw std::runtime_error(os.str());
        }
        const auto m = mean_se(ratios);
        s.ratio_mean[k] = m.mean;
        s.ratio_se[k] = m.se;
    }
    // tail estimate over the two largest distances, paired per replicate
    std::vector<double> tail;
    const int k1 = kmax - 1;
    const int k0 = kmax >= 2 ? kmax - 2 : kmax - 1;
    for (int rep = 0; rep < s.n_reps; ++rep) {
        const double t0 = s.times[k0][rep];
        const double t1 = s.times[k1][rep];
        if (std::isinf(t0) || std::isinf(t1)) continue;
        tail.push_back(0.5 * (t0 / s.distances[k0] + t1 / s.distances[k1]));
    }
    const auto tm = mean_se(tail);
    s.a_hat = tm.mean;
    s.a_se = tm.se;
    s.gamma_hat = *std::min_element(s.ratio_mean.begin(), s.ratio_mean.end());
}

}  // namespace

DirectionalSample directional_time_constant(const LatticeModel& model,
                                            std::span<const double> direction, int k_max,
                                            double step, int n_reps, std::uint64_t seed,
                                            Exec exec) {
    if (k_max < 4) throw std::invalid_argument("directional_time_constant: k_max >= 4 required");
    if (n_reps < 2) throw std::invalid_argument("directional_time_constant: n_reps >= 2 required");
    const double norm_u = euclidean_norm(direction);
    if (norm_u == 0.0) throw std::invalid_argument("directional_time_constant: zero direction");

    DirectionalSample s;
    s.k_max = k_max;
    s.n_reps = n_reps;
    s.direction = scaled(direction, 1.0 / norm_u);

    std::vector<LatticePoint> targets;
    LatticePoint v;
    if (snap_to_lattice_vector(s.direction, v)) {
        std::vector<double> vd(v.begin(), v.end());
        const double vnorm = euclidean_norm(vd);
        const auto q = std::max<std::int64_t>(1, std::llround(step / vnorm));
        s.step = static_cast<double>(q) * vnorm;
        for (int k = 1; k <= k_max; ++k) {
            LatticePoint t(v.size());
            for (std::size_t a = 0; a < v.size(); ++a) t[a] = v[a] * q * k;
            targets.push_back(std::move(t));
        }
    } else {
        s.step = step;
        for (int k = 1; k <= k_max; ++k)
            targets.push_back(psi_round(scaled(s.direction, step * static_cast<double>(k))));
    }
    for (int k = 1; k <= k_max; ++k) s.distances.push_back(s.step * static_cast<double>(k));

    std::vector<LatticePoint> hull_pts = {LatticePoint(model.dim, 0), targets.back()};
    IntBox tight = IntBox::hull(hull_pts, 0);
    std::int64_t span = 0;
    for (int a = 0; a < model.dim; ++a) span = std::max(span, tight.extent(a) - 1);
    const auto pad =
        std::max<std::int64_t>(8, std::llround(model.guard_factor * static_cast<double>(span)));
    const IntBox box = IntBox::hull(hull_pts, pad);

    s.times.assign(k_max, std::vector<double>(n_reps, 0.0));
    const LatticePoint origin(model.dim, 0);
    for_each_index(exec, n_reps, [&](std::int64_t rep) {
        const auto field =
            model.field_for(box, hash_u64(hash_u64(seed, 0x646972656374ULL),
                                          static_cast<std::uint64_t>(rep)));
        const auto dist = first_passage_time(field, origin);
        for (int k = 0; k < k_max; ++k) s.times[k][rep] = dist[box.index_of(targets[k])];
    });

    finalize_sample(s);
    return s;
}

DirectionalSample directional_time_constant(const ContinuumModel& model,
                                            std::span<const double> direction, int k_max,
                                            double step, int n_reps, std::uint64_t seed,
                                            Exec exec) {
    if (k_max < 4) throw std::invalid_argument("directional_time_constant: k_max >= 4 required");
    if (n_reps < 2) throw std::invalid_argument("directional_time_constant: n_reps >= 2 required");
    const double norm_u = euclidean_norm(direction);
    if (norm_u == 0.0) throw std::invalid_argument("directional_time_constant: zero direction");

    DirectionalSample s;
    s.k_max = k_max;
    s.n_reps = n_reps;
    s.step = step;
    s.direction = scaled(direction, 1.0 / norm_u);
    std::vector<std::vector<double>> targets;
    for (int k = 1; k <= k_max; ++k) {
        targets.push_back(scaled(s.direction, step * static_cast<double>(k)));
        s.distances.push_back(step * static_cast<double>(k));
    }

    RealBox box;
    box.lo.assign(model.dim, 0.0);
    box.hi.assign(model.dim, 0.0);
    double span = 0.0;
    for (int a = 0; a < model.dim; ++a) {
        box.lo[a] = std::min(0.0, targets.back()[a]);
        box.hi[a] = std::max(0.0, targets.back()[a]);
        span = std::max(span, box.hi[a] - box.lo[a]);
    }
    const double pad = std::max(model.pad, 0.25 * span) + 1.0;
    for (int a = 0; a < model.dim; ++a) {
        box.lo[a] -= pad;
        box.hi[a] += pad;
    }

    s.times.assign(k_max, std::vector<double>(n_reps, 0.0));
    for_each_index(exec, n_reps, [&](std::int64_t rep) {
        const auto ev = model.events_for(
            box, hash_u64(hash_u64(seed, 0x636f6e74646972ULL), static_cast<std::uint64_t>(rep)));
        const EventGraphIndex index(ev);
        SourceRegion src;
        src.centers.push_back(std::vector<double>(model.dim, 0.0));
        const ContinuumTimes times(index, src);
        for (int k = 0; k < k_max; ++k) {
            const auto bt = times.ball_time(targets[k], 1.0, model.mesh_pitch);
            s.times[k][rep] = bt.truncated ? kInfiniteTime : bt.time;
        }
    });

    finalize_sample(s);
    return s;
}

std::vector<std::vector<double>> lattice_direction_mesh(int dim) {
    std::vector<std::vector<double>> dirs;
    for (int a = 0; a < dim; ++a) {
        for (int sign = -1; sign <= 1; sign += 2) {
            std::vector<double> u(dim, 0.0);
            u[a] = sign;
            dirs.push_back(std::move(u));
        }
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
            for (int sa = -1; sa <= 1; sa += 2) {
                for (int sb = -1; sb <= 1; sb += 2) {
                    std::vector<double> u(dim, 0.0);
                    u[a] = sa * s;
                    u[b] = sb * s;
                    dirs.push_back(std::move(u));
                }
            }
        }
    }
    return dirs;
}

std::vector<std::vector<double>> planar_direction_mesh(int count) {
    std::vector<std::vector<double>> dirs;
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < count; ++i) {
        const double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(count);
        dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
}

namespace {

std::vector<double> orbit_key(std::span<const double> u, SymmetryGroup g) {
    switch (g) {
        case SymmetryGroup::full_rotational:
            return {};
        case SymmetryGroup::none:
            return std::vector<double>(u.begin(), u.end());
        case SymmetryGroup::lattice_hyperoctahedral: {
            std::vector<double> key(u.begin(), u.end());
            for (double& c : key) c = std::abs(c);
            std::sort(key.begin(), key.end(), std::greater<>());
            return key;
        }
    }
    return {};
}

bool keys_match(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-9) return false;
    return true;
}

const char* symmetry_name(SymmetryGroup g) {
    switch (g) {
        case SymmetryGroup::lattice_hyperoctahedral: return "lattice-hyperoctahedral";
        case SymmetryGroup::full_rotational: return "full-rotational";
        case SymmetryGroup::none: return "none";
    }
    return "none";
}

SymmetryGroup symmetry_from_name(const std::string& name) {
    if (name == "lattice-hyperoctahedral") return SymmetryGroup::lattice_hyperoctahedral;
    if (name == "full-rotational") return SymmetryGroup::full_rotational;
    if (name == "none") return SymmetryGroup::none;
    throw std::invalid_argument("unknown symmetry group: " + name);
}

}  // namespace

NormEstimate fit_norm(std::span<const DirectionalSample> samples, SymmetryGroup symmetry,
                      double lambda_hat, double lambda_se) {
    if (samples.empty()) throw std::invalid_argument("fit_norm: no directional samples");
    NormEstimate est;
    est.dim = static_cast<int>(samples[0].direction.size());
    est.symmetry = symmetry;
    est.lambda_hat = lambda_hat;
    est.lambda_se = lambda_se;

    std::vector<std::vector<double>> keys;
    for (const auto& s : samples) {
        if (static_cast<int>(s.direction.size()) != est.dim)
            throw std::invalid_argument("fit_norm: inconsistent dimensions");
        NormEstimate::Entry e;
        e.direction = s.direction;
        e.value = s.a_hat;
        e.se = s.a_se;
        const auto key = orbit_key(s.direction, symmetry);
        int orbit = -1;
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys_match(keys[i], key)) orbit = static_cast<int>(i);
        if (orbit < 0) {
            orbit = static_cast<int>(keys.size());
            keys.push_back(key);
        }
        e.orbit = orbit;
        est.entries.push_back(std::move(e));
    }
    est.orbit_count = static_cast<int>(keys.size());

    // pool each orbit: plain mean when variance-free, else inverse-variance
    for (int orbit = 0; orbit < est.orbit_count; ++orbit) {
        std::vector<const NormEstimate::Entry*> members;
        for (const auto& e : est.entries)
            if (e.orbit == orbit) members.push_back(&e);
        bool exact = true;
        for (const auto* e : members) exact = exact && e->se < 1e-14;
        double pooled = 0.0, pooled_se = 0.0;
        if (exact) {
            for (const auto* e : members) pooled += e->value;
            pooled /= static_cast<double>(members.size());
        } else {
            double wsum = 0.0;
            for (const auto* e : members) {
                const double w = 1.0 / std::max(e->se * e->se, 1e-24);
                pooled += w * e->value;
                wsum += w;
            }
            pooled /= wsum;
            pooled_se = std::sqrt(1.0 / wsum);
        }
        for (auto& e : est.entries) {
            if (e.orbit != orbit) continue;
            e.pooled_value = pooled;
            e.pooled_se = pooled_se;
            // orbit members should agree with the pool within 3 SE
            if (std::abs(e.value - pooled) >
                3.0 * std::sqrt(e.se * e.se + pooled_se * pooled_se) + 1e-12) {
                std::ostringstream os;
                os << "orbit " << orbit << ": direction estimate " << e.value
                   << " deviates from pooled " << pooled << " beyond 3 SE";
                est.flags.push_back(os.str());
            }
        }
        if (pooled <= 3.0 * pooled_se) {
            std::ostringstream os;
            os << "orbit " << orbit << ": pooled value " << pooled
               << " not separated from 0 at 3 SE (degenerate or underpowered)";
            est.flags.push_back(os.str());
        }
    }

    // subadditivity on direction pairs, evaluated through the fitted table
    const auto nearest = [&](std::span<const double> w) {
        double best = -1.0;
        std::size_t arg = 0;
        const double nw = euclidean_norm(w);
        for (std::size_t i = 0; i < est.entries.size(); ++i) {
            const double ad = std::abs(dot(est.entries[i].direction, w)) / nw;
            if (ad > best) {
                best = ad;
                arg = i;
            }
        }
        return std::pair<std::size_t, double>(arg, std::acos(std::clamp(best, -1.0, 1.0)));
    };
    for (std::size_t i = 0; i < est.entries.size(); ++i) {
        for (std::size_t j = i; j < est.entries.size(); ++j) {
            const auto w = add(est.entries[i].direction, est.entries[j].direction);
            const double nw = euclidean_norm(w);
            if (nw < 1e-9) continue;  // antipodal pair
            const auto [arg, angle] = nearest(w);
            const double aw = nw * est.entries[arg].pooled_value;
            const double ai = est.entries[i].pooled_value;
            const double aj = est.entries[j].pooled_value;
            const double se = std::sqrt(est.entries[i].pooled_se * est.entries[i].pooled_se +
                                        est.entries[j].pooled_se * est.entries[j].pooled_se +
                                        nw * nw * est.entries[arg].pooled_se *
                                            est.entries[arg].pooled_se);
            const double slack = 3.0 * se + est.lipschitz() * angle * nw + 1e-12;
            ++est.subadditivity.pairs;
            const double excess = aw - (ai + aj) - slack;
            if (excess > 0.0) {
                ++est.subadditivity.violations;
                est.subadditivity.max_excess = std::max(est.subadditivity.max_excess, excess);
            }
        }
    }
    return est;
}

double NormEstimate::lipschitz() const {
    if (lambda_hat > 0.0) return 2.0 * lambda_hat;
    double mx = 0.0;
    for (const auto& e : entries) mx = std::max(mx, e.pooled_value);
    return mx;
}

Norm NormEstimate::to_norm() const {
    std::vector<std::vector<double>> dirs;
    std::vector<double> values;
    for (const auto& e : entries) {
        if (!(e.pooled_value > 0.0))
            throw std::runtime_error(
                "NormEstimate::to_norm: a pooled direction value is not positive; see flags");
        dirs.push_back(e.direction);
        values.push_back(e.pooled_value);
    }
    return Norm::tabulated(dim, std::move(dirs), std::move(values), lipschitz());
}

std::string NormEstimate::to_json_string() const {
    nlohmann::json j;
    j["dimension"] = dim;
    j["symmetry"] = symmetry_name(symmetry);
    j["lambda_hat"] = lambda_hat;
    j["lambda_se"] = lambda_se;
    j["orbit_count"] = orbit_count;
    j["flags"] = flags;
    j["subadditivity"] = {{"pairs", subadditivity.pairs},
                          {"violations", subadditivity.violations},
                          {"max_excess", subadditivity.max_excess}};
    auto& dirs = j["directions"];
    dirs = nlohmann::json::array();
    for (const auto& e : entries) {
        dirs.push_back({{"direction", e.direction},
                        {"value", e.value},
                        {"se", e.se},
                        {"orbit", e.orbit},
                        {"pooled_value", e.pooled_value},
                        {"pooled_se", e.pooled_se}});
    }
    return j.dump(2);
}

NormEstimate NormEstimate::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    NormEstimate est;
    est.dim = j.at("dimension").get<int>();
    est.symmetry = symmetry_from_name(j.at("symmetry").get<std::string>());
    est.lambda_hat = j.at("lambda_hat").get<double>();
    est.lambda_se = j.value("lambda_se", 0.0);
    est.orbit_count = j.at("orbit_count").get<int>();
    if (j.contains("flags")) est.flags = j.at("flags").get<std::vector<std::string>>();
    for (const auto& d : j.at("directions")) {
        Entry e;
        e.direction = d.at("direction").get<std::vector<double>>();
        e.value = d.at("value").get<double>();
        e.se = d.at("se").get<double>();
        e.orbit = d.at("orbit").get<int>();
        e.pooled_value = d.at("pooled_value").get<double>();
        e.pooled_se = d.at("pooled_se").get<double>();
        est.entries.push_back(std::move(e));
    }
    return est;
}

void NormEstimate::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << to_json_string() << '\n';
}

NormEstimate NormEstimate::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return from_json_string(buf.str());
}

KingmanReport kingman_diagnostics(const DirectionalSample& sample) {
    KingmanReport rep;
    rep.gamma_hat = sample.gamma_hat;
    const int kmax = sample.k_max;
    std::vector<double> mean_t(kmax), se_t(kmax);
    for (int k = 0; k < kmax; ++k) {
        std::vector<double> finite;
        for (double t : sample.times[k])
            if (!std::isinf(t)) finite.push_back(t);
        const auto m = mean_se(finite);
        mean_t[k] = m.mean;
        se_t[k] = m.se;
    }
    for (int n = 2; n <= kmax; ++n) {
        for (int m = 1; m < n; ++m) {
            KingmanReport::Split sp;
            sp.m = m;
            sp.n = n;
            sp.lhs = mean_t[n - 1];
            sp.rhs = mean_t[m - 1] + mean_t[n - m - 1];
            sp.slack_se = 3.0 * std::sqrt(se_t[n - 1] * se_t[n - 1] + se_t[m - 1] * se_t[m - 1] +
                                          se_t[n - m - 1] * se_t[n - m - 1]);
            sp.ok = sp.lhs <= sp.rhs + sp.slack_se + 1e-12;
            if (!sp.ok) ++rep.split_violations;
            rep.splits.push_back(sp);
        }
    }
    for (int k = 0; k + 1 < kmax; ++k) {
        const double slack = 3.0 * std::sqrt(sample.ratio_se[k] * sample.ratio_se[k] +
                                             sample.ratio_se[k + 1] * sample.ratio_se[k + 1]);
        if (sample.ratio_mean[k + 1] > sample.ratio_mean[k] + slack + 1e-12)
            ++rep.ratio_violations;
    }
    rep.ratio_nonincreasing = rep.ratio_violations == 0;
    return rep;
}

namespace {

std::vector<std::vector<double>> unit_ball_mesh(int dim, double pitch) {
    std::vector<std::vector<double>> mesh;
    const auto span = static_cast<std::int64_t>(std::floor(1.0 / pitch));
    std::vector<std::int64_t> idx(dim, -span);
    while (true) {
        std::vector<double> p(dim);
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            p[a] = static_cast<double>(idx[a]) * pitch;
            r2 += p[a] * p[a];
        }
        if (r2 <= 1.0 + 1e-12) mesh.push_back(std::move(p));
        int a = 0;
        for (;; ++a) {
            if (a == dim) return mesh;
            if (++idx[a] <= span) break;
            idx[a] = -span;
        }
    }
}

}  // namespace

LambdaEstimate lambda_estimate(const LatticeModel& model, int n_reps, std::uint64_t seed,
                               double mesh_pitch, Exec exec) {
    LambdaEstimate out;
    out.mesh = unit_ball_mesh(model.dim, mesh_pitch);
    const IntBox box = IntBox::cube(model.dim, -8, 8);
    const LatticePoint origin(model.dim, 0);

    std::vector<LatticePoint> targets;
    for (const auto& m : out.mesh) targets.push_back(psi_round(m));

    std::vector<std::vector<double>> times(out.mesh.size(), std::vector<double>(n_reps));
    for_each_index(exec, n_reps, [&](std::int64_t rep) {
        const auto field = model.field_for(
            box, hash_u64(hash_u64(seed, 0x6c616d626461ULL), static_cast<std::uint64_t>(rep)));
        const auto dist = first_passage_time(field, origin);
        for (std::size_t i = 0; i < targets.size(); ++i)
            times[i][rep] = dist[box.index_of(targets[i])];
    });
    out.mesh_means.resize(out.mesh.size());
    for (std::size_t i = 0; i < out.mesh.size(); ++i) {
        const auto m = mean_se(times[i]);
        out.mesh_means[i] = m.mean;
        if (m.mean > out.lambda_hat) {
            out.lambda_hat = m.mean;
            out.se = m.se;
        }
    }

    // Lemma-A.1-style audit: E T(x, y) <= (|y - x| + 1) Lambda, within SEs
    Rng rng(hash_u64(seed, 0x61756469746cULL));
    for (int pair = 0; pair < 8; ++pair) {
        LambdaEstimate::AuditRow row;
        row.x.resize(model.dim);
        row.y.resize(model.dim);
        rng.next_in_ball(3.0, row.x);
        std::vector<double> d(model.dim);
        rng.next_unit_vector(d);
        const double len = rng.next_uniform(2.0, 12.0);
        for (int a = 0; a < model.dim; ++a) row.y[a] = row.x[a] + len * d[a];
        const auto px = psi_round(row.x);
        const auto py = psi_round(row.y);
        std::vector<LatticePoint> pts = {px, py};
        const IntBox pair_box = IntBox::hull(pts, 10);
        std::vector<double> ts(n_reps);
        for_each_index(exec, n_reps, [&](std::int64_t rep) {
            const auto field = model.field_for(
                pair_box, hash_u64(hash_u64(seed, 0x706169727378ULL + pair),
                                   static_cast<std::uint64_t>(rep)));
            ts[rep] = first_passage_time(field, px, py);
        });
        const auto m = mean_se(ts);
        const double dist_xy = euclidean_norm(sub(row.y, row.x));
        row.mean_time = m.mean;
        row.bound = (dist_xy + 1.0) * out.lambda_hat +
                    3.0 * std::sqrt(m.se * m.se + (dist_xy + 1.0) * (dist_xy + 1.0) * out.se * out.se);
        row.ok = row.mean_time <= row.bound + 1e-12;
        out.audit_ok = out.audit_ok && row.ok;
        out.audit.push_back(std::move(row));
    }
    return out;
}

LambdaEstimate lambda_estimate(const ContinuumModel& model, int n_reps, std::uint64_t seed,
                               double mesh_pitch, Exec exec) {
    LambdaEstimate out;
    out.mesh = unit_ball_mesh(model.dim, mesh_pitch);
    RealBox box = RealBox::cube(model.dim, -2.0 - model.pad, 2.0 + model.pad);

    std::vector<std::vector<double>> times(out.mesh.size(), std::vector<double>(n_reps));
    for_each_index(exec, n_reps, [&](std::int64_t rep) {
        const auto ev = model.events_for(
            box, hash_u64(hash_u64(seed, 0x6c616d626463ULL), static_cast<std::uint64_t>(rep)));
        const EventGraphIndex index(ev);
        SourceRegion src;
        src.centers.push_back(std::vector<double>(model.dim, 0.0));
        const ContinuumTimes t(index, src);
        for (std::size_t i = 0; i < out.mesh.size(); ++i) {
            const auto bt = t.ball_time(out.mesh[i], 1.0, model.mesh_pitch);
            times[i][rep] = bt.truncated ? kInfiniteTime : bt.time;
        }
    });
    out.mesh_means.resize(out.mesh.size());
    for (std::size_t i = 0; i < out.mesh.size(); ++i) {
        std::vector<double> finite;
        for (double t : times[i])
            if (!std::isinf(t)) finite.push_back(t);
        if (finite.size() + finite.size() / 100 < times[i].size())
            throw std::runtime_error("lambda_estimate: truncated replicates exceed 1%");
        const auto m = mean_se(finite);
        out.mesh_means[i] = m.mean;
        if (m.mean > out.lambda_hat) {
            out.lambda_hat = m.mean;
            out.se = m.se;
        }
    }

    Rng rng(hash_u64(seed, 0x617564697463ULL));
    for (int pair = 0; pair < 6; ++pair) {
        LambdaEstimate::AuditRow row;
        row.x.resize(model.dim);
        row.y.resize(model.dim);
        rng.next_in_ball(2.0, row.x);
        std::vector<double> d(model.dim);
        rng.next_unit_vector(d);
        const double len = rng.next_uniform(1.0, 6.0);
        for (int a = 0; a < model.dim; ++a) row.y[a] = row.x[a] + len * d[a];
        RealBox pair_box;
        pair_box.lo.resize(model.dim);
        pair_box.hi.resize(model.dim);
        for (int a = 0; a < model.dim; ++a) {
            pair_box.lo[a] = std::min(row.x[a], row.y[a]) - model.pad - 1.0;
            pair_box.hi[a] = std::max(row.x[a], row.y[a]) + model.pad + 1.0;
        }
        std::vector<double> ts(n_reps, kInfiniteTime);
        for_each_index(exec, n_reps, [&](std::int64_t rep) {
            const auto ev = model.events_for(
                pair_box, hash_u64(hash_u64(seed, 0x70616972637eULL + pair),
                                   static_cast<std::uint64_t>(rep)));
            const EventGraphIndex index(ev);
            SourceRegion src;
            src.centers.push_back(row.x);
            const ContinuumTimes t(index, src);
            const auto bt = t.ball_time(row.y, 1.0, model.mesh_pitch);
            ts[rep] = bt.truncated ? kInfiniteTime : bt.time;
        });
        std::vector<double> finite;
        for (double t : ts)
            if (!std::isinf(t)) finite.push_back(t);
        if (finite.empty()) throw std::runtime_error("lambda_estimate: audit pair fully truncated");
        const auto m = mean_se(finite);
        const double dist_xy = euclidean_norm(sub(row.y, row.x));
        row.mean_time = m.mean;
        row.bound = (dist_xy + 1.0) * out.lambda_hat +
                    3.0 * std::sqrt(m.se * m.se + (dist_xy + 1.0) * (dist_xy + 1.0) * out.se * out.se);
        row.ok = row.mean_time <= row.bound + 1e-12;
        out.audit_ok = out.audit_ok && row.ok;
        out.audit.push_back(std::move(row));
    }
    return out;
}

}  // namespace fpcomp
