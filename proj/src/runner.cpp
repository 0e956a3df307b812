#include "fpcomp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fpcomp/config.hpp"
#include "fpcomp/rng.hpp"
#include "fpcomp/experiments.hpp"
#include "fpcomp/norm_estimation.hpp"
#include "fpcomp/territory_io.hpp"

namespace fpcomp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content,
                std::vector<std::string>* files = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << content;
    if (files) files->push_back(path.filename().string());
}

std::string csv_d(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json facet_a_json(const FacetA& f) {
    return json{{"radii", f.radii},          {"ratios", f.ratios},
                {"numerators", f.numerators}, {"denominators", f.denominators},
                {"lower", f.lower},          {"upper", f.upper},
                {"fragile_points", f.fragile_points}};
}

json theorem_payload(const TheoremReport& rep) {
    json scales = json::array();
    for (const auto& s : rep.scales) {
        json sites = json::array();
        for (const auto& site : s.sites) {
            sites.push_back({{"site", site.site},
                             {"in_i", site.in_i},
                             {"facet_a", facet_a_json(site.facet_a)},
                             {"rep_density_mean", site.rep_density_mean},
                             {"rep_density_se", site.rep_density_se},
                             {"rep_densities", site.rep_densities}});
        }
        scales.push_back({{"R", s.R},
                          {"guard_margin", s.guard_margin},
                          {"rho_max", s.rho_max},
                          {"grid_points", s.grid_points},
                          {"frac_reps_all_above", s.frac_reps_all_above},
                          {"ties_observed", s.ties_observed},
                          {"unreached_observed", s.unreached_observed},
                          {"sites", sites}});
    }
    return json{{"scales", scales},
                {"spearman_lower", rep.spearman_lower},
                {"in_i", rep.in_i}};
}

void theorem_csvs(const TheoremReport& rep, const fs::path& dir,
                  std::vector<std::string>& files) {
    {
        std::ostringstream os;
        os << "R,site,radius,ratio,numerator,denominator\n";
        for (const auto& s : rep.scales)
            for (const auto& site : s.sites)
                for (std::size_t r = 0; r < site.facet_a.radii.size(); ++r)
                    os << csv_d(s.R) << ',' << site.site << ',' << csv_d(site.facet_a.radii[r])
                       << ',' << csv_d(site.facet_a.ratios[r]) << ','
                       << site.facet_a.numerators[r] << ',' << site.facet_a.denominators[r]
                       << '\n';
        write_file(dir / "facet_a.csv", os.str(), &files);
    }
    {
        std::ostringstream os;
        os << "R,site,replicate,density\n";
        for (const auto& s : rep.scales)
            for (const auto& site : s.sites)
                for (std::size_t r = 0; r < site.rep_densities.size(); ++r)
                    os << csv_d(s.R) << ',' << site.site << ',' << r << ','
                       << csv_d(site.rep_densities[r]) << '\n';
        write_file(dir / "facet_b.csv", os.str(), &files);
    }
    {
        std::ostringstream os;
        os << "R,site,in_i,facet_a_lower,facet_a_upper,rep_density_mean,rep_density_se,"
              "frac_reps_all_above\n";
        for (const auto& s : rep.scales)
            for (const auto& site : s.sites)
                os << csv_d(s.R) << ',' << site.site << ',' << (site.in_i ? 1 : 0) << ','
                   << csv_d(site.facet_a.lower) << ',' << csv_d(site.facet_a.upper) << ','
                   << csv_d(site.rep_density_mean) << ',' << csv_d(site.rep_density_se) << ','
                   << csv_d(s.frac_reps_all_above) << '\n';
        write_file(dir / "summary.csv", os.str(), &files);
    }
}

json coexistence_payload(const CoexistenceReport& rep) {
    json scales = json::array();
    for (const auto& s : rep.scales) {
        scales.push_back({{"R", s.R},
                          {"n_reps", s.n_reps},
                          {"successes", s.successes},
                          {"p_hat", s.wilson.p_hat},
                          {"wilson_low", s.wilson.low},
                          {"wilson_high", s.wilson.high},
                          {"shell_sizes", s.shell_sizes}});
    }
    return json{{"scales", scales}};
}

void coexistence_csv(const CoexistenceReport& rep, const fs::path& dir,
                     std::vector<std::string>& files) {
    std::ostringstream os;
    os << "R,n_reps,successes,p_hat,wilson_low,wilson_high\n";
    for (const auto& s : rep.scales)
        os << csv_d(s.R) << ',' << s.n_reps << ',' << s.successes << ',' << csv_d(s.wilson.p_hat)
           << ',' << csv_d(s.wilson.low) << ',' << csv_d(s.wilson.high) << '\n';
    write_file(dir / "coexistence.csv", os.str(), &files);
}

json line_payload(const LineCompetitionReport& rep) {
    return json{{"alphas", rep.alphas},
                {"p_hat", rep.p_hat},
                {"mean_gap_ratio", rep.mean_gap_ratio},
                {"passing_fraction", rep.passing_fraction},
                {"upper_bound_violations", rep.upper_bound_violations},
                {"n_of_x", rep.n_of_x}};
}

void line_csv(const LineCompetitionReport& rep, const fs::path& dir,
              std::vector<std::string>& files) {
    std::ostringstream os;
    os << "alpha,p_hat,mean_gap_ratio\n";
    for (std::size_t i = 0; i < rep.alphas.size(); ++i)
        os << csv_d(rep.alphas[i]) << ',' << csv_d(rep.p_hat[i]) << ','
           << csv_d(rep.mean_gap_ratio[i]) << '\n';
    write_file(dir / "line.csv", os.str(), &files);
}

json audit_payload(const AssumptionAudit& audit) {
    json items = json::array();
    for (const auto& it : audit.items)
        items.push_back({{"name", it.name}, {"pass", it.pass}, {"evidence", it.evidence}});
    return json{{"items", items}, {"all_pass", audit.all_pass()}};
}

void audit_csv(const AssumptionAudit& audit, const fs::path& dir,
               std::vector<std::string>& files) {
    std::ostringstream os;
    os << "assumption,pass,evidence\n";
    for (const auto& it : audit.items)
        os << '"' << it.name << "\"," << (it.pass ? 1 : 0) << ",\"" << it.evidence << "\"\n";
    write_file(dir / "audit.csv", os.str(), &files);
}

void norm_csvs(const NormEstimate& est, const fs::path& dir, std::vector<std::string>& files) {
    {
        std::ostringstream os;
        os << "orbit";
        for (int a = 0; a < est.dim; ++a) os << ",u" << a;
        os << ",value,se,pooled_value,pooled_se\n";
        for (const auto& e : est.entries) {
            os << e.orbit;
            for (double c : e.direction) os << ',' << csv_d(c);
            os << ',' << csv_d(e.value) << ',' << csv_d(e.se) << ',' << csv_d(e.pooled_value)
               << ',' << csv_d(e.pooled_se) << '\n';
        }
        write_file(dir / "directions.csv", os.str(), &files);
    }
    {
        // one row per pooled orbit
        std::ostringstream os;
        os << "orbit,value,se,directions\n";
        for (int orbit = 0; orbit < est.orbit_count; ++orbit) {
            int n = 0;
            double value = 0.0, se = 0.0;
            for (const auto& e : est.entries) {
                if (e.orbit != orbit) continue;
                ++n;
                value = e.pooled_value;
                se = e.pooled_se;
            }
            os << orbit << ',' << csv_d(value) << ',' << csv_d(se) << ',' << n << '\n';
        }
        write_file(dir / "orbits.csv", os.str(), &files);
    }
}

json run_norm_experiment(const RunConfig& cfg, const fs::path& dir,
                         std::vector<std::string>& files) {
    const auto nr = cfg.norm_run();
    std::vector<std::vector<double>> dirs;
    if (nr.directions == "lattice") {
        dirs = lattice_direction_mesh(static_cast<int>(cfg.get_int("dimension")));
    } else {
        const int count = std::stoi(nr.directions.substr(6));
        dirs = planar_direction_mesh(count);
    }
    std::vector<DirectionalSample> samples;
    std::uint64_t dir_seed = cfg.seed();
    json ratio_rows = json::array();
    json kingman_rows = json::array();
    for (const auto& u : dirs) {
        DirectionalSample s =
            cfg.is_continuum()
                ? directional_time_constant(cfg.continuum_model(), u, nr.k_max, nr.step,
                                            nr.n_reps, hash_u64(dir_seed, 0x6e6f726dULL))
                : directional_time_constant(cfg.lattice_model(), u, nr.k_max, nr.step, nr.n_reps,
                                            hash_u64(dir_seed, 0x6e6f726dULL));
        ++dir_seed;
        const auto king = kingman_diagnostics(s);
        kingman_rows.push_back({{"direction", s.direction},
                                {"split_violations", king.split_violations},
                                {"ratio_nonincreasing", king.ratio_nonincreasing},
                                {"gamma_hat", king.gamma_hat}});
        ratio_rows.push_back({{"direction", s.direction},
                              {"distances", s.distances},
                              {"ratio_mean", s.ratio_mean},
                              {"ratio_se", s.ratio_se}});
        samples.push_back(std::move(s));
    }
    double lambda_hat = 0.0, lambda_se = 0.0;
    json lambda_json;
    if (nr.estimate_lambda) {
        const auto lam =
            cfg.is_continuum()
                ? lambda_estimate(cfg.continuum_model(), nr.lambda_reps,
                                  hash_u64(cfg.seed(), 0x6c616dULL))
                : lambda_estimate(cfg.lattice_model(), nr.lambda_reps,
                                  hash_u64(cfg.seed(), 0x6c616dULL));
        lambda_hat = lam.lambda_hat;
        lambda_se = lam.se;
        lambda_json = json{{"lambda_hat", lam.lambda_hat},
                           {"se", lam.se},
                           {"pair_bound_ok", lam.audit_ok}};
    }
    const auto est = fit_norm(samples, cfg.is_continuum()
                                           ? SymmetryGroup::full_rotational
                                           : SymmetryGroup::lattice_hyperoctahedral,
                              lambda_hat, lambda_se);
    write_file(dir / "norm.json", est.to_json_string() + "\n", &files);
    norm_csvs(est, dir, files);
    {
        std::ostringstream os;
        os << "direction_index,distance,ratio_mean,ratio_se\n";
        for (std::size_t d = 0; d < samples.size(); ++d)
            for (std::size_t k = 0; k < samples[d].distances.size(); ++k)
                os << d << ',' << csv_d(samples[d].distances[k]) << ','
                   << csv_d(samples[d].ratio_mean[k]) << ',' << csv_d(samples[d].ratio_se[k])
                   << '\n';
        write_file(dir / "ratios.csv", os.str(), &files);
    }
    return json{{"estimate", json::parse(est.to_json_string())},
                {"ratio_curves", ratio_rows},
                {"kingman", kingman_rows},
                {"lambda", lambda_json}};
}

json run_territories(const RunConfig& cfg, const fs::path& dir,
                     std::vector<std::string>& files) {
    const auto plan = cfg.plan();
    const auto norm = cfg.comparison_norm();
    const int count = std::max(1, cfg.snapshots());
    json scales = json::array();
    for (std::size_t ri = 0; ri < plan.scale_ladder.size(); ++ri) {
        const double R = plan.scale_ladder[ri];
        const auto g = stage_geometry(plan, R);
        json maps = json::array();
        for (int rep = 0; rep < count; ++rep) {
            const std::uint64_t rep_seed =
                hash_u64(hash_u64(hash_u64(plan.master_seed, 0x7465727269ULL), ri),
                         static_cast<std::uint64_t>(rep));
            std::ostringstream base;
            base << "grid_R" << R << "_rep" << rep;
            TerritoryMap map;
            if (!plan.continuum) {
                const auto field = plan.lattice.field_for(g.box, rep_seed);
                map = competing_territories(field, g.sources);
            } else {
                const auto ev = plan.continuum_model.events_for(g.rbox, rep_seed);
                const EventGraphIndex index(ev);
                map = continuum_territories(index, g.scaled_sites, g.rgrid).map;
                std::ostringstream ev_name;
                ev_name << "events_R" << R << "_rep" << rep << ".bin";
                write_events_binary(dir / ev_name.str(), ev);
                files.push_back(ev_name.str());
            }
            write_territory_binary(dir / (base.str() + ".bin"), map);
            files.push_back(base.str() + ".bin");
            {
                std::ofstream os(dir / (base.str() + ".csv"));
                write_territory_csv(os, map);
                files.push_back(base.str() + ".csv");
            }
            if (map.box.dim() == 2 && !plan.continuum) {
                SiteConfiguration overlay;
                overlay.sites = g.scaled_sites;
                write_ppm(dir / (base.str() + ".ppm"),
                          territory_image(map, Palette::standard(), &norm, &overlay));
                files.push_back(base.str() + ".ppm");
            } else if (map.box.dim() == 2) {
                write_ppm(dir / (base.str() + ".ppm"), territory_image(map));
                files.push_back(base.str() + ".ppm");
            }
            maps.push_back(base.str() + ".bin");
        }
        scales.push_back({{"R", R}, {"grids", maps}});
    }
    return json{{"scales", scales}};
}

json run_experiment(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                    std::vector<std::string>& warnings) {
    if (const auto warn = cfg.weight_warning()) warnings.push_back(*warn);
    const std::string kind = cfg.experiment();
    if (kind == "norm") return run_norm_experiment(cfg, dir, files);
    if (kind == "territories") return run_territories(cfg, dir, files);
    if (kind == "theorem11" || kind == "theorem12") {
        const auto rep = density_experiment(cfg.plan(), cfg.comparison_norm());
        theorem_csvs(rep, dir, files);
        return theorem_payload(rep);
    }
    if (kind == "coexistence") {
        const auto rep = coexistence_experiment(cfg.plan(), cfg.comparison_norm());
        coexistence_csv(rep, dir, files);
        return coexistence_payload(rep);
    }
    if (kind == "line") {
        const auto lc = cfg.line_config();
        const auto rep = cfg.is_continuum()
                             ? line_competition_experiment(cfg.continuum_model(), lc)
                             : line_competition_experiment(cfg.lattice_model(), lc);
        line_csv(rep, dir, files);
        return line_payload(rep);
    }
    if (kind == "audit") {
        const auto audit = cfg.is_continuum()
                               ? assumption_audit(cfg.continuum_model(), cfg.audit_samples(),
                                                  cfg.seed())
                               : assumption_audit(cfg.lattice_model(), cfg.audit_samples(),
                                                  cfg.seed());
        audit_csv(audit, dir, files);
        return audit_payload(audit);
    }
    throw std::invalid_argument("unknown experiment kind: " + kind);
}

void write_error(const fs::path& dir, const std::string& kind, const std::string& message) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return;  // no run directory; the message already went to stderr
    const json err = {{"error", kind}, {"message", message}};
    std::ofstream os(dir / "error.json");
    os << err.dump(2) << '\n';
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

}  // namespace

int run_command(const RunOptions& options) {
    RunConfig cfg;
    try {
        cfg = RunConfig::parse_file(options.config_path);
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    std::string out = cfg.out_dir();
    if (const char* env = std::getenv("FPCOMP_OUTDIR")) out = env;
    if (options.out_dir_override) out = *options.out_dir_override;
    int workers = 0;
    if (const char* env = std::getenv("FPCOMP_WORKERS")) workers = std::atoi(env);
    if (options.workers_override > 0) workers = options.workers_override;
    if (workers > 0) set_worker_count(workers);

    const fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << dir << ": " << ec.message() << '\n';
        return 1;
    }

    std::vector<std::string> files;
    std::vector<std::string> warnings;
    write_file(dir / "resolved.cfg", cfg.resolved_text(), &files);

    const auto t0 = std::chrono::steady_clock::now();
    json payload;
    try {
        payload = run_experiment(cfg, dir, files, warnings);
    } catch (const std::invalid_argument& e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        write_error(dir, "precondition", e.what());
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        write_error(dir, "runtime", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        write_error(dir, "internal", e.what());
        return 1;
    }
    const auto t1 = std::chrono::steady_clock::now();

    json report;
    report["experiment"] = cfg.experiment();
    report["config_hash"] = hex64(cfg.config_hash());
    report["seed"] = cfg.seed();
    report["config"] = cfg.resolved_text();
    report["warnings"] = warnings;
    report["payload"] = payload;
    write_file(dir / "report.json", report.dump(2) + "\n", &files);

    json manifest;
    manifest["tool"] = kToolVersion;
    manifest["experiment"] = cfg.experiment();
    manifest["config_hash"] = hex64(cfg.config_hash());
    manifest["seed"] = cfg.seed();
    manifest["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0;
    manifest["files"] = files;
    manifest["warnings"] = warnings;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << (dir / "report.json").string() << '\n';
    return 0;
}

int validate_command(const std::filesystem::path& config_path) {
    try {
        auto cfg = RunConfig::parse_file(config_path);
        cfg.validate();
        std::cout << cfg.resolved_text();
        if (const auto warn = cfg.weight_warning())
            std::cerr << "warning: " << *warn << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
}

int render_command(const std::filesystem::path& report_path,
                   const std::optional<std::string>& out_dir) {
    try {
        std::ifstream is(report_path);
        if (!is) throw std::runtime_error("cannot open " + report_path.string());
        json report = json::parse(is);
        const std::string kind = report.at("experiment").get<std::string>();
        const fs::path dir = out_dir ? fs::path(*out_dir) : report_path.parent_path();
        fs::create_directories(dir);
        std::vector<std::string> files;
        const json& payload = report.at("payload");

        if (kind == "theorem11" || kind == "theorem12") {
            TheoremReport rep;
            for (const auto& s : payload.at("scales")) {
                ScaleReport scale;
                scale.R = s.at("R").get<double>();
                scale.frac_reps_all_above = s.at("frac_reps_all_above").get<double>();
                for (const auto& site : s.at("sites")) {
                    SiteScaleReport sr;
                    sr.site = site.at("site").get<int>();
                    sr.in_i = site.at("in_i").get<bool>();
                    const auto& fa = site.at("facet_a");
                    sr.facet_a.radii = fa.at("radii").get<std::vector<double>>();
                    sr.facet_a.ratios = fa.at("ratios").get<std::vector<double>>();
                    sr.facet_a.numerators = fa.at("numerators").get<std::vector<std::int64_t>>();
                    sr.facet_a.denominators =
                        fa.at("denominators").get<std::vector<std::int64_t>>();
                    sr.facet_a.lower = fa.at("lower").get<double>();
                    sr.facet_a.upper = fa.at("upper").get<double>();
                    sr.rep_densities = site.at("rep_densities").get<std::vector<double>>();
                    sr.rep_density_mean = site.at("rep_density_mean").get<double>();
                    sr.rep_density_se = site.at("rep_density_se").get<double>();
                    scale.sites.push_back(std::move(sr));
                }
                rep.scales.push_back(std::move(scale));
            }
            theorem_csvs(rep, dir, files);
        } else if (kind == "coexistence") {
            CoexistenceReport rep;
            for (const auto& s : payload.at("scales")) {
                CoexistenceReport::Scale scale;
                scale.R = s.at("R").get<double>();
                scale.n_reps = s.at("n_reps").get<int>();
                scale.successes = s.at("successes").get<std::int64_t>();
                scale.wilson.p_hat = s.at("p_hat").get<double>();
                scale.wilson.low = s.at("wilson_low").get<double>();
                scale.wilson.high = s.at("wilson_high").get<double>();
                rep.scales.push_back(std::move(scale));
            }
            coexistence_csv(rep, dir, files);
        } else if (kind == "line") {
            LineCompetitionReport rep;
            rep.alphas = payload.at("alphas").get<std::vector<double>>();
            rep.p_hat = payload.at("p_hat").get<std::vector<double>>();
            rep.mean_gap_ratio = payload.at("mean_gap_ratio").get<std::vector<double>>();
            rep.passing_fraction = payload.at("passing_fraction").get<double>();
            rep.n_of_x = payload.at("n_of_x").get<double>();
            line_csv(rep, dir, files);
        } else if (kind == "norm") {
            const auto est =
                NormEstimate::from_json_string(payload.at("estimate").dump());
            norm_csvs(est, dir, files);
        } else if (kind == "audit") {
            AssumptionAudit audit;
            for (const auto& it : payload.at("items"))
                audit.items.push_back({it.at("name").get<std::string>(),
                                       it.at("pass").get<bool>(),
                                       it.at("evidence").get<std::string>()});
            audit_csv(audit, dir, files);
        } else if (kind == "territories") {
            // regenerate rasters from the stored binary grids
            for (const auto& s : payload.at("scales")) {
                for (const auto& name : s.at("grids")) {
                    const fs::path bin = report_path.parent_path() / name.get<std::string>();
                    const auto map = read_territory_binary(bin);
                    if (map.box.dim() != 2) continue;
                    fs::path out = dir / bin.filename();
                    out.replace_extension(".ppm");
                    write_ppm(out, territory_image(map));
                    files.push_back(out.filename().string());
                }
            }
        } else {
            throw std::runtime_error("report has unknown experiment kind: " + kind);
        }
        for (const auto& f : files) std::cout << "wrote " << (dir / f).string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "render error: " << e.what() << '\n';
        return 2;
    }
}

int seed_scan_command(const RunOptions& options, std::uint64_t seed_lo, std::uint64_t seed_hi) {
    if (seed_hi < seed_lo) {
        std::cerr << "seed-scan: empty seed range\n";
        return 2;
    }
    RunConfig base;
    try {
        base = RunConfig::parse_file(options.config_path);
        base.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    std::string out = base.out_dir();
    if (const char* env = std::getenv("FPCOMP_OUTDIR")) out = env;
    if (options.out_dir_override) out = *options.out_dir_override;
    const fs::path dir(out);
    fs::create_directories(dir);

    std::ostringstream summary;
    summary << "seed,exit_code,report\n";
    int worst = 0;
    for (std::uint64_t s = seed_lo; s <= seed_hi; ++s) {
        const fs::path sub = dir / ("seed_" + std::to_string(s));
        // rewrite the seed and run into the subdirectory
        const fs::path cfg_path = sub / "config.cfg";
        fs::create_directories(sub);
        {
            RunConfig cfg = base;
            cfg.set("seed", std::to_string(s));
            cfg.set("out_dir", sub.string());
            std::ofstream os(cfg_path);
            os << cfg.resolved_text();
        }
        RunOptions sub_options = options;
        sub_options.config_path = cfg_path;
        sub_options.out_dir_override = sub.string();
        const int rc = run_command(sub_options);
        worst = std::max(worst, rc);
        summary << s << ',' << rc << ',' << (sub / "report.json").string() << '\n';
    }
    write_file(dir / "seed_scan.csv", summary.str());
    std::cout << "wrote " << (dir / "seed_scan.csv").string() << '\n';
    return worst;
}

}  // namespace fpcomp
