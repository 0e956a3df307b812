#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fpcomp/models.hpp"
#include "fpcomp/norm.hpp"
#include "fpcomp/parallel.hpp"

namespace fpcomp {

// Replicated passage times along one direction at distances k * step,
// k = 1..k_max, with the subadditive ratio curve T / distance.
struct DirectionalSample {
    std::vector<double> direction;  // unit vector
    double step = 1.0;              // effective step (lattice snapping may adjust it)
    int k_max = 0;
    int n_reps = 0;
    std::vector<double> distances;           // k * step
    std::vector<std::vector<double>> times;  // [k][rep]; +inf marks truncated replicates
    std::vector<double> ratio_mean, ratio_se;

    double a_hat = 0.0;      // tail estimate: mean ratio over the two largest k
    double a_se = 0.0;
    double gamma_hat = 0.0;  // Fekete-style lower diagnostic: min_k mean ratio
};

// Lattice variant. Directions proportional to a small integer vector are
// snapped so targets are exact lattice points; other directions round
// targets with psi. Throws when more than 1% of replicates at some distance
// are unreachable.
DirectionalSample directional_time_constant(const LatticeModel& model,
                                            std::span<const double> direction, int k_max,
                                            double step, int n_reps, std::uint64_t seed,
                                            Exec exec = Exec::openmp);

// Continuum variant: T(0, x) = time to cover x + B starting from B,
// evaluated as a mesh sup over the target ball.
DirectionalSample directional_time_constant(const ContinuumModel& model,
                                            std::span<const double> direction, int k_max,
                                            double step, int n_reps, std::uint64_t seed,
                                            Exec exec = Exec::openmp);

enum class SymmetryGroup { lattice_hyperoctahedral, full_rotational, none };

struct SubadditivityAudit {
    std::int64_t pairs = 0;
    std::int64_t violations = 0;
    double max_excess = 0.0;
};

struct NormEstimate {
    int dim = 2;
    SymmetryGroup symmetry = SymmetryGroup::none;

    struct Entry {
        std::vector<double> direction;
        double value = 0.0;         // per-direction estimate
        double se = 0.0;
        int orbit = 0;
        double pooled_value = 0.0;  // shared across the symmetry orbit
        double pooled_se = 0.0;
    };
    std::vector<Entry> entries;
    int orbit_count = 0;

    double lambda_hat = 0.0;  // 0 = not estimated
    double lambda_se = 0.0;

    SubadditivityAudit subadditivity;
    std::vector<std::string> flags;  // degeneracy watchdog etc.

    double lipschitz() const;  // 2*Lambda when known, else max pooled value
    Norm to_norm() const;      // tabulated norm over the pooled values

    std::string to_json_string() const;
    static NormEstimate from_json_string(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static NormEstimate load(const std::filesystem::path& path);
};

// Pools orbit-equivalent directions, audits subadditivity on direction
// pairs, and flags directions indistinguishable from zero.
NormEstimate fit_norm(std::span<const DirectionalSample> samples, SymmetryGroup symmetry,
                      double lambda_hat = 0.0, double lambda_se = 0.0);

// Default direction meshes: all signed axes plus all signed two-coordinate
// diagonals for the lattice; equiangular planar directions for d = 2.
std::vector<std::vector<double>> lattice_direction_mesh(int dim);
std::vector<std::vector<double>> planar_direction_mesh(int count = 16);

struct KingmanReport {
    struct Split {
        int m = 0, n = 0;      // checks E X_{0,n} <= E X_{0,m} + E X_{m,n}
        double lhs = 0.0;
        double rhs = 0.0;
        double slack_se = 0.0;  // 3 * combined SE
        bool ok = true;
    };
    std::vector<Split> splits;
    std::int64_t split_violations = 0;
    std::int64_t ratio_violations = 0;  // ratio curve increases beyond 3 SE
    bool ratio_nonincreasing = true;
    double gamma_hat = 0.0;
};

// Subadditivity of the mean sequence on every split (stationarity supplies
// E X_{m,n} = E X_{0,n-m}) plus the Fekete trend of the ratio curve.
KingmanReport kingman_diagnostics(const DirectionalSample& sample);

struct LambdaEstimate {
    double lambda_hat = 0.0;
    double se = 0.0;
    std::vector<std::vector<double>> mesh;  // probed unit-ball points
    std::vector<double> mesh_means;
    struct AuditRow {
        std::vector<double> x, y;
        double mean_time = 0.0;
        double bound = 0.0;  // (|y-x| + 1) * lambda_hat + 3 SE
        bool ok = true;
    };
    std::vector<AuditRow> audit;  // Lemma-A.1-style bound on random pairs
    bool audit_ok = true;
};

LambdaEstimate lambda_estimate(const LatticeModel& model, int n_reps, std::uint64_t seed,
                               double mesh_pitch = 0.25, Exec exec = Exec::openmp);
LambdaEstimate lambda_estimate(const ContinuumModel& model, int n_reps, std::uint64_t seed,
                               double mesh_pitch = 0.25, Exec exec = Exec::openmp);

}  // namespace fpcomp
