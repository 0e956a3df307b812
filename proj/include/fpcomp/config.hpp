#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpcomp/experiments.hpp"

namespace fpcomp {

// Flat key = value run configuration ('#' starts a comment). Unknown keys
// are errors; every run writes the resolved form (defaults materialized,
// keys sorted) next to its outputs.
class RunConfig {
public:
    static RunConfig parse_file(const std::filesystem::path& path);
    static RunConfig parse_text(const std::string& text);

    // throws std::invalid_argument naming the offending key
    void validate() const;

    std::string resolved_text() const;   // canonical, defaults included
    std::uint64_t config_hash() const;   // FNV-1a of the resolved text

    const std::string& experiment() const { return experiment_; }
    bool is_continuum() const;

    // assembled model/experiment objects
    LatticeModel lattice_model() const;
    ContinuumModel continuum_model() const;
    ExperimentPlan plan() const;
    Norm comparison_norm() const;  // resolves file: references
    std::optional<std::string> weight_warning() const;

    LineCompetitionConfig line_config() const;

    // norm-estimation parameters
    struct NormRun {
        int k_max = 16;
        double step = 4.0;
        int n_reps = 48;
        std::string directions = "lattice";  // lattice | planar<count>
        int lambda_reps = 16;
        bool estimate_lambda = true;
    };
    NormRun norm_run() const;

    std::int64_t audit_samples() const { return get_int("audit.samples"); }
    std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("seed")); }
    std::string out_dir() const { return get_string("out_dir"); }
    int workers() const { return static_cast<int>(get_int("workers")); }
    int snapshots() const { return static_cast<int>(get_int("snapshots")); }

    // raw access (used by the runner for reporting)
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    void set(const std::string& key, const std::string& value);

private:
    std::map<std::string, std::string> values_;
    std::string experiment_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace fpcomp
