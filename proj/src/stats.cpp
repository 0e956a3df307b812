#include "fpcomp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fpcomp {

MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.n = static_cast<std::int64_t>(xs.size());
    if (r.n == 0) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - r.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(r.n - 1);
    r.se = std::sqrt(var / static_cast<double>(r.n));
    return r;
}

namespace {

// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const std::size_t na = sa.size(), nb = sb.size();
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < na && ib < nb) {
        const double x = std::min(sa[ia], sb[ib]);
        while (ia < na && sa[ia] <= x) ++ia;
        while (ib < nb && sb[ib] <= x) ++ib;
        const double fa = static_cast<double>(ia) / static_cast<double>(na);
        const double fb = static_cast<double>(ib) / static_cast<double>(nb);
        d = std::max(d, std::abs(fa - fb));
    }

    KsResult r;
    r.statistic = d;
    const double ne = static_cast<double>(na) * static_cast<double>(nb) /
                      static_cast<double>(na + nb);
    const double sq = std::sqrt(ne);
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
    WilsonInterval w;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    w.p_hat = p;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    w.low = std::max(0.0, center - half);
    w.high = std::min(1.0, center + half);
    return w;
}

namespace {

std::vector<double> ranks_with_ties(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman_rho: need two equal-length samples");
    const auto rx = ranks_with_ties(x);
    const auto ry = ranks_with_ties(y);
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    if (q <= 0.0) return xs.front();
    if (q >= 1.0) return xs.back();
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

}  // namespace fpcomp
