#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fpcomp {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    std::int64_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

// Two-sample Kolmogorov-Smirnov.
struct KsResult {
    double statistic = 0.0;  // sup |F1 - F2|
    double p_value = 1.0;    // asymptotic, Numerical-Recipes style correction
};
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Wilson score interval for a binomial proportion at the given z (default 95%).
struct WilsonInterval {
    double p_hat = 0.0;
    double low = 0.0;
    double high = 1.0;
};
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z = 1.959963984540054);

// Spearman rank correlation; average ranks for ties.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// Empirical quantile (linear interpolation between order statistics).
double quantile(std::vector<double> xs, double q);

}  // namespace fpcomp
