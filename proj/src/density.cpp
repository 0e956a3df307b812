#include "fpcomp/density.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "fpcomp/rng.hpp"

namespace fpcomp {

namespace {

struct Counts {
    std::int64_t total = 0;
    std::int64_t d_hits = 0;
    std::int64_t cd_hits = 0;
};

void check_radii(const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("relative_density: empty radius list");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i] < radii[i + 1]))
            throw std::invalid_argument("relative_density: radii must be strictly increasing");
    if (!(radii.front() > 0.0))
        throw std::invalid_argument("relative_density: radii must be positive");
}

}  // namespace

DensityReport relative_density(const SetPredicate& c, const SetPredicate& d, int dim,
                               const std::vector<double>& radii,
                               const DensityEstimatorConfig& cfg) {
    check_radii(radii);
    const std::size_t nr = radii.size();
    std::vector<Counts> per_radius(nr);

    if (cfg.mode == DensityEstimatorConfig::Mode::grid) {
        if (!(cfg.pitch > 0.0)) throw std::invalid_argument("relative_density: pitch must be positive");
        const double rmax = radii.back();
        const std::int64_t span = static_cast<std::int64_t>(std::floor(rmax / cfg.pitch)) + 1;
        std::vector<std::int64_t> idx(dim, -span);
        std::vector<double> z(dim);
        // odometer over cell centers (i + 1/2) * pitch inside the largest ball
        bool done = false;
        while (!done) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                z[a] = (static_cast<double>(idx[a]) + 0.5) * cfg.pitch;
                r2 += z[a] * z[a];
            }
            const double r = std::sqrt(r2);
            if (r <= rmax) {
                const auto first = std::lower_bound(radii.begin(), radii.end(), r);
                if (first != radii.end()) {
                    const std::size_t k0 = static_cast<std::size_t>(first - radii.begin());
                    const bool in_d = d(z);
                    const bool in_cd = in_d && c(z);
                    for (std::size_t k = k0; k < nr; ++k) {
                        ++per_radius[k].total;
                        if (in_d) ++per_radius[k].d_hits;
                        if (in_cd) ++per_radius[k].cd_hits;
                    }
                }
            }
            for (int a = 0;; ++a) {
                if (a == dim) {
                    done = true;
                    break;
                }
                if (++idx[a] < span) break;
                idx[a] = -span;
            }
        }
    } else {
        const std::int64_t shard_size = 4096;
        for (std::size_t k = 0; k < nr; ++k) {
            const std::int64_t shards = (cfg.samples + shard_size - 1) / shard_size;
            std::vector<Counts> slot(shards);
            for_each_index(cfg.exec, shards, [&](std::int64_t s) {
                Rng rng(hash_u64(hash_u64(cfg.seed, static_cast<std::uint64_t>(k)),
                                 static_cast<std::uint64_t>(s)));
                std::vector<double> z(dim);
                const std::int64_t lo = s * shard_size;
                const std::int64_t hi = std::min(cfg.samples, lo + shard_size);
                Counts counts;
                for (std::int64_t i = lo; i < hi; ++i) {
                    rng.next_in_ball(radii[k], z);
                    ++counts.total;
                    if (d(z)) {
                        ++counts.d_hits;
                        if (c(z)) ++counts.cd_hits;
                    }
                }
                slot[s] = counts;
            });
            for (const auto& sc : slot) {
                per_radius[k].total += sc.total;
                per_radius[k].d_hits += sc.d_hits;
                per_radius[k].cd_hits += sc.cd_hits;
            }
        }
    }

    DensityReport report;
    report.estimator = cfg.mode == DensityEstimatorConfig::Mode::grid ? "grid" : "monte-carlo";
    report.pitch = cfg.mode == DensityEstimatorConfig::Mode::grid ? cfg.pitch : 0.0;
    bool any_defined = false;
    for (std::size_t k = 0; k < nr; ++k) {
        DensityRow row;
        row.radius = radii[k];
        row.samples = per_radius[k].total;
        row.d_hits = per_radius[k].d_hits;
        row.cd_hits = per_radius[k].cd_hits;
        if (per_radius[k].d_hits == 0) {
            row.defined = false;
            row.ratio = std::nan("");
        } else {
            row.ratio = static_cast<double>(row.cd_hits) / static_cast<double>(row.d_hits);
            if (cfg.mode == DensityEstimatorConfig::Mode::monte_carlo)
                row.stderr_ = std::sqrt(row.ratio * (1.0 - row.ratio) /
                                        static_cast<double>(row.d_hits));
            any_defined = true;
        }
        report.rows.push_back(row);
    }
    if (!any_defined)
        throw std::runtime_error("relative_density: D has no mass in the largest ball");

    std::size_t window = static_cast<std::size_t>(
        std::llround(cfg.tail_window * static_cast<double>(nr)));
    window = std::clamp<std::size_t>(window, 1, nr);
    report.tail_rows = static_cast<std::int64_t>(window);
    double lo = 2.0, hi = -1.0;
    for (std::size_t k = nr - window; k < nr; ++k) {
        if (!report.rows[k].defined) continue;
        lo = std::min(lo, report.rows[k].ratio);
        hi = std::max(hi, report.rows[k].ratio);
    }
    if (hi < 0.0) {  // window had no defined rows; fall back to all defined rows
        for (const auto& row : report.rows) {
            if (!row.defined) continue;
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
        }
    }
    report.lower_estimate = lo;
    report.upper_estimate = hi;
    return report;
}

void DensityReport::write_csv(std::ostream& os) const {
    os << "radius,ratio,stderr,samples\n";
    for (const auto& row : rows) {
        os << row.radius << ',';
        if (row.defined)
            os << row.ratio;
        else
            os << "nan";
        os << ',' << row.stderr_ << ',' << row.samples << '\n';
    }
}

std::string DensityReport::to_json_string() const {
    nlohmann::json j;
    j["estimator"] = estimator;
    if (estimator == "grid") j["pitch"] = pitch;
    j["tail_rows"] = tail_rows;
    j["lower_estimate"] = lower_estimate;
    j["upper_estimate"] = upper_estimate;
    auto& rows_j = j["rows"];
    rows_j = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json rj;
        rj["radius"] = row.radius;
        rj["ratio"] = row.defined ? nlohmann::json(row.ratio) : nlohmann::json();
        rj["stderr"] = row.stderr_;
        rj["samples"] = row.samples;
        rj["d_hits"] = row.d_hits;
        rows_j.push_back(rj);
    }
    return j.dump(2);
}

}  // namespace fpcomp
