#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace fpcomp {

inline constexpr const char* kToolVersion = "fpcomp 0.1.0";

// exit codes: 0 success, 1 internal error, 2 invalid config, 3 model or
// precondition failure; failures leave an error.json in the run directory
struct RunOptions {
    std::filesystem::path config_path;
    std::optional<std::string> out_dir_override;  // beats FPCOMP_OUTDIR beats config
    int workers_override = 0;                     // beats FPCOMP_WORKERS; 0 = leave as is
};

int run_command(const RunOptions& options);
int validate_command(const std::filesystem::path& config_path);
int render_command(const std::filesystem::path& report_path,
                   const std::optional<std::string>& out_dir);
int seed_scan_command(const RunOptions& options, std::uint64_t seed_lo, std::uint64_t seed_hi);

}  // namespace fpcomp
