#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fpcomp {

// A norm on R^d. Built-in kinds are exact; the tabulated kind stores values
// on a finite set of unit directions and extends by homogeneity, evaluating
// a query at the nearest stored direction (axis symmetric: u and -u match).
class Norm {
public:
    enum class Kind { l1, l2, linf, scaled_euclidean, tabulated };

    static Norm l1(int dim);
    static Norm l2(int dim);
    static Norm linf(int dim);
    static Norm scaled_euclidean(int dim, double mu);
    // directions must be unit vectors, values strictly positive; lipschitz is
    // the global constant used for the extension error bound (2*Lambda).
    static Norm tabulated(int dim, std::vector<std::vector<double>> directions,
                          std::vector<double> values, double lipschitz);

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    double scale() const { return mu_; }
    double lipschitz() const { return lipschitz_; }
    const std::vector<std::vector<double>>& directions() const { return directions_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(std::span<const double> x) const;

    struct ValueWithBound {
        double value = 0.0;
        double error_bound = 0.0;  // 0 for built-in kinds
    };
    // Tabulated kind: nearest stored value plus the Lipschitz slack
    // lipschitz * (angle to nearest stored direction) * |x|.
    ValueWithBound evaluate_with_bound(std::span<const double> x) const;

    // Samples triples (x, y) and reports how often N(x+y) > N(x)+N(y)+tol.
    struct TriangleAudit {
        std::int64_t samples = 0;
        std::int64_t violations = 0;
        double max_excess = 0.0;
    };
    TriangleAudit audit_triangle(std::int64_t samples, std::uint64_t seed, double tol) const;

    std::string describe() const;

private:
    Norm() = default;
    Kind kind_ = Kind::l2;
    int dim_ = 2;
    double mu_ = 1.0;
    double lipschitz_ = 0.0;
    std::vector<std::vector<double>> directions_;
    std::vector<double> values_;
};

// Ordered list of k >= 2 pairwise distinct sites, optionally scaled.
struct SiteConfiguration {
    std::vector<std::vector<double>> sites;
    double scale = 1.0;

    std::size_t k() const { return sites.size(); }
    int dimension() const { return sites.empty() ? 0 : static_cast<int>(sites[0].size()); }
    std::vector<double> scaled_site(std::size_t i) const;
    SiteConfiguration scaled_by(double r) const;

    // throws std::invalid_argument on k < 2, dimension mismatch, or duplicates
    void validate() const;
};

// Small vector helpers used throughout the geometry code.
double dot(std::span<const double> a, std::span<const double> b);
double euclidean_norm(std::span<const double> x);
std::vector<double> sub(std::span<const double> a, std::span<const double> b);
std::vector<double> add(std::span<const double> a, std::span<const double> b);
std::vector<double> scaled(std::span<const double> a, double s);

}  // namespace fpcomp
