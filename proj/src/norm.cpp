#include "fpcomp/norm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fpcomp/rng.hpp"

namespace fpcomp {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double euclidean_norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

std::vector<double> sub(std::span<const double> a, std::span<const double> b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

std::vector<double> scaled(std::span<const double> a, double s) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

Norm Norm::l1(int dim) {
    Norm n;
    n.kind_ = Kind::l1;
    n.dim_ = dim;
    return n;
}

Norm Norm::l2(int dim) {
    Norm n;
    n.kind_ = Kind::l2;
    n.dim_ = dim;
    return n;
}

Norm Norm::linf(int dim) {
    Norm n;
    n.kind_ = Kind::linf;
    n.dim_ = dim;
    return n;
}

Norm Norm::scaled_euclidean(int dim, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("scaled_euclidean: mu must be positive");
    Norm n;
    n.kind_ = Kind::scaled_euclidean;
    n.dim_ = dim;
    n.mu_ = mu;
    return n;
}

Norm Norm::tabulated(int dim, std::vector<std::vector<double>> directions,
                     std::vector<double> values, double lipschitz) {
    if (directions.empty() || directions.size() != values.size())
        throw std::invalid_argument("tabulated norm: direction/value count mismatch");
    for (std::size_t i = 0; i < directions.size(); ++i) {
        if (static_cast<int>(directions[i].size()) != dim)
            throw std::invalid_argument("tabulated norm: direction dimension mismatch");
        const double len = euclidean_norm(directions[i]);
        if (std::abs(len - 1.0) > 1e-9)
            throw std::invalid_argument("tabulated norm: directions must be unit vectors");
        if (!(values[i] > 0.0))
            throw std::invalid_argument("tabulated norm: values must be strictly positive");
    }
    Norm n;
    n.kind_ = Kind::tabulated;
    n.dim_ = dim;
    n.lipschitz_ = lipschitz;
    n.directions_ = std::move(directions);
    n.values_ = std::move(values);
    return n;
}

double Norm::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("norm: point dimension mismatch");
    switch (kind_) {
        case Kind::l1: {
            double s = 0.0;
            for (double c : x) s += std::abs(c);
            return s;
        }
        case Kind::l2:
            return euclidean_norm(x);
        case Kind::linf: {
            double s = 0.0;
            for (double c : x) s = std::max(s, std::abs(c));
            return s;
        }
        case Kind::scaled_euclidean:
            return mu_ * euclidean_norm(x);
        case Kind::tabulated:
            return evaluate_with_bound(x).value;
    }
    return 0.0;
}

Norm::ValueWithBound Norm::evaluate_with_bound(std::span<const double> x) const {
    ValueWithBound out;
    const double r = euclidean_norm(x);
    if (r == 0.0) return out;
    if (kind_ != Kind::tabulated) {
        out.value = (*this)(x);
        return out;
    }
    // nearest stored axis (u matches both u and -u; norms are even)
    double best_abs_dot = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < directions_.size(); ++i) {
        const double ad = std::abs(dot(directions_[i], x)) / r;
        if (ad > best_abs_dot) {
            best_abs_dot = ad;
            best = i;
        }
    }
    const double angle = std::acos(std::clamp(best_abs_dot, -1.0, 1.0));
    out.value = r * values_[best];
    out.error_bound = lipschitz_ * angle * r;
    return out;
}

Norm::TriangleAudit Norm::audit_triangle(std::int64_t samples, std::uint64_t seed,
                                         double tol) const {
    TriangleAudit audit;
    audit.samples = samples;
    Rng rng(hash_u64(seed, 0x7261746e67617564ULL));
    std::vector<double> x(dim_), y(dim_), s(dim_);
    for (std::int64_t i = 0; i < samples; ++i) {
        rng.next_in_ball(10.0, x);
        rng.next_in_ball(10.0, y);
        for (int c = 0; c < dim_; ++c) s[c] = x[c] + y[c];
        const double lhs = (*this)(s);
        const double rhs = (*this)(x) + (*this)(y);
        if (lhs > rhs + tol) {
            ++audit.violations;
            audit.max_excess = std::max(audit.max_excess, lhs - rhs);
        }
    }
    return audit;
}

std::string Norm::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::l1: os << "l1"; break;
        case Kind::l2: os << "l2"; break;
        case Kind::linf: os << "linf"; break;
        case Kind::scaled_euclidean: os << "euclidean*" << mu_; break;
        case Kind::tabulated: os << "tabulated[" << directions_.size() << " dirs]"; break;
    }
    return os.str();
}

std::vector<double> SiteConfiguration::scaled_site(std::size_t i) const {
    return scaled(sites.at(i), scale);
}

SiteConfiguration SiteConfiguration::scaled_by(double r) const {
    SiteConfiguration c = *this;
    c.scale *= r;
    return c;
}

void SiteConfiguration::validate() const {
    if (sites.size() < 2) throw std::invalid_argument("site configuration: k >= 2 required");
    if (!(scale > 0.0)) throw std::invalid_argument("site configuration: scale must be positive");
    const std::size_t d = sites[0].size();
    if (d < 2) throw std::invalid_argument("site configuration: dimension >= 2 required");
    for (const auto& s : sites)
        if (s.size() != d) throw std::invalid_argument("site configuration: mixed dimensions");
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t j = i + 1; j < sites.size(); ++j)
            if (sites[i] == sites[j])
                throw std::invalid_argument("site configuration: sites must be pairwise distinct");
}

}  // namespace fpcomp
