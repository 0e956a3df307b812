// Command-line front end: run experiments from a config file, validate
// configs, re-render report artifacts, and scan seed ranges.

#include <CLI11.hpp>

#include "fpcomp/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fpcomp - competing first-passage growth simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string report_path;
    std::string out_dir;
    int workers = 0;
    std::string seeds;

    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "key = value config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config and FPCOMP_OUTDIR)");
    run->add_option("--workers", workers, "worker threads (overrides FPCOMP_WORKERS)");

    auto* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("config", config_path, "key = value config file")->required();

    auto* render = app.add_subcommand("render", "emit CSV/PPM artifacts from a report");
    render->add_option("report", report_path, "report.json produced by run")->required();
    render->add_option("--out", out_dir, "output directory (defaults to the report's)");

    auto* scan = app.add_subcommand("seed-scan", "run a config across a range of seeds");
    scan->add_option("config", config_path, "key = value config file")->required();
    scan->add_option("--seeds", seeds, "inclusive range a..b")->required();
    scan->add_option("--out", out_dir, "output directory");
    scan->add_option("--workers", workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    fpcomp::RunOptions options;
    options.config_path = config_path;
    if (!out_dir.empty()) options.out_dir_override = out_dir;
    options.workers_override = workers;

    if (run->parsed()) return fpcomp::run_command(options);
    if (validate->parsed()) return fpcomp::validate_command(config_path);
    if (render->parsed())
        return fpcomp::render_command(report_path, out_dir.empty()
                                                       ? std::nullopt
                                                       : std::optional<std::string>(out_dir));
    if (scan->parsed()) {
        const auto sep = seeds.find("..");
        if (sep == std::string::npos) {
            std::cerr << "seed-scan: --seeds expects a..b\n";
            return 2;
        }
        try {
            const auto lo = std::stoull(seeds.substr(0, sep));
            const auto hi = std::stoull(seeds.substr(sep + 2));
            return fpcomp::seed_scan_command(options, lo, hi);
        } catch (const std::exception&) {
            std::cerr << "seed-scan: --seeds expects a..b with integers\n";
            return 2;
        }
    }
    return 1;
}
