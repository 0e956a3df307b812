#include "fpcomp/voronoi.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fpcomp/rng.hpp"

namespace fpcomp {

bool voronoi_member(std::span<const double> z, std::size_t i, const SiteConfiguration& cfg,
                    const Norm& n) {
    return voronoi_delta_member(z, i, cfg, n, 0.0);
}

bool voronoi_delta_member(std::span<const double> z, std::size_t i, const SiteConfiguration& cfg,
                          const Norm& n, double delta) {
    if (i >= cfg.k()) throw std::out_of_range("voronoi member: site index out of range");
    const auto xi = cfg.scaled_site(i);
    const double di = n(sub(z, xi));
    for (std::size_t j = 0; j < cfg.k(); ++j) {
        if (j == i) continue;
        const auto xj = cfg.scaled_site(j);
        if (!(di < n(sub(z, xj)) - delta)) return false;
    }
    return true;
}

void Cone::validate() const {
    if (base_directions.empty()) throw std::invalid_argument("cone: empty base");
    if (!(radius > 0.0)) throw std::invalid_argument("cone: radius must be positive");
    for (const auto& u : base_directions) {
        if (u.size() != apex.size()) throw std::invalid_argument("cone: dimension mismatch");
        if (std::abs(euclidean_norm(u) - 1.0) > 1e-9)
            throw std::invalid_argument("cone: base directions must be unit vectors");
    }
}

bool cone_member(std::span<const double> z, const Cone& c, double angular_tol) {
    const auto v = sub(z, c.apex);
    const double r = euclidean_norm(v);
    if (r < c.radius) return false;  // lambda >= 1 needs |v| >= S
    for (const auto& u : c.base_directions) {
        const double cosang = dot(v, u) / r;
        if (std::acos(std::clamp(cosang, -1.0, 1.0)) <= angular_tol) return true;
    }
    return false;
}

StabilityReport homothety_stability_check(const SetPredicate& predicate,
                                          std::span<const double> center,
                                          std::span<const double> sample_center,
                                          double sample_radius, std::int64_t trials,
                                          std::uint64_t seed, double lambda_max) {
    StabilityReport report;
    Rng rng(hash_u64(seed, 0x686f6d6f74686574ULL));
    const std::size_t d = center.size();
    std::vector<double> z(d), mapped(d);
    const std::int64_t max_attempts = trials * 64;
    while (report.tested < trials && report.attempts < max_attempts) {
        ++report.attempts;
        rng.next_in_ball(sample_radius, z);
        for (std::size_t c = 0; c < d; ++c) z[c] += sample_center[c];
        if (!predicate(z)) continue;
        ++report.tested;
        const double lambda = rng.next_uniform(1.0, lambda_max);
        for (std::size_t c = 0; c < d; ++c) mapped[c] = center[c] + lambda * (z[c] - center[c]);
        if (!predicate(mapped)) report.violations.push_back({z, lambda});
    }
    return report;
}

StabilityReport translate_stability_check(std::span<const double> x, double delta, const Norm& n,
                                          std::int64_t trials, std::uint64_t seed,
                                          double sample_radius) {
    if (euclidean_norm(x) == 0.0)
        throw std::invalid_argument("translate stability: x must be nonzero");
    SiteConfiguration cfg;
    cfg.sites.push_back(std::vector<double>(x.size(), 0.0));
    cfg.sites.push_back(std::vector<double>(x.begin(), x.end()));
    const SetPredicate member = [&](std::span<const double> z) {
        return voronoi_delta_member(z, 0, cfg, n, delta);
    };
    if (sample_radius <= 0.0) sample_radius = 6.0 * (euclidean_norm(x) + std::abs(delta) + 1.0);
    return translate_stability_check(member, x, trials, seed, sample_radius);
}

StabilityReport translate_stability_check(const SetPredicate& member, std::span<const double> x,
                                          std::int64_t trials, std::uint64_t seed,
                                          double sample_radius) {
    StabilityReport report;
    Rng rng(hash_u64(seed, 0x7472616e736c6174ULL));
    const std::size_t d = x.size();
    std::vector<double> z(d), shifted(d);
    const std::int64_t max_attempts = trials * 64;
    while (report.tested < trials && report.attempts < max_attempts) {
        ++report.attempts;
        rng.next_in_ball(sample_radius, z);
        if (!member(z)) continue;
        ++report.tested;
        for (std::size_t c = 0; c < d; ++c) shifted[c] = z[c] - x[c];
        if (!member(shifted)) report.violations.push_back({z, 1.0});
    }
    return report;
}

CoexistenceGeometry coexistence_geometry_check(const SiteConfiguration& cfg, const Norm& n,
                                               double sphere_tol, double t_tol, double margin) {
    cfg.validate();
    for (std::size_t i = 0; i < cfg.k(); ++i) {
        const double ni = n(cfg.sites[i]);
        if (std::abs(ni - 1.0) > sphere_tol) {
            std::ostringstream os;
            os << "coexistence geometry: site " << i << " has N = " << ni
               << ", not on the unit sphere (tol " << sphere_tol << ")";
            throw std::invalid_argument(os.str());
        }
    }

    CoexistenceGeometry out;
    out.site_pass.assign(cfg.k(), true);
    const std::size_t d = cfg.sites[0].size();
    std::vector<double> z(d);
    for (std::size_t i = 0; i < cfg.k(); ++i) {
        for (std::size_t j = i + 1; j < cfg.k(); ++j) {
            const auto& a = cfg.sites[i];
            const auto& b = cfg.sites[j];
            const auto at = [&](double t) {
                for (std::size_t c = 0; c < d; ++c) z[c] = (1.0 - t) * a[c] + t * b[c];
                return n(z);
            };
            // N along a segment is convex; ternary search localizes the min.
            double lo = 0.0, hi = 1.0;
            while (hi - lo > t_tol) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (at(m1) <= at(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            SegmentWitness w;
            w.i = i;
            w.j = j;
            w.t_min = 0.5 * (lo + hi);
            w.n_min = at(w.t_min);
            w.z_min = z;
            w.pass = w.n_min < 1.0 - margin;
            if (!w.pass) {
                out.site_pass[i] = false;
                out.site_pass[j] = false;
            }
            out.pairs.push_back(std::move(w));
        }
    }
    out.all_pass = true;
    for (const auto& p : out.pairs) out.all_pass = out.all_pass && p.pass;
    return out;
}

}  // namespace fpcomp
