#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace exactq {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Survival function of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double stat, int dof);

// Kolmogorov limit distribution tail Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_sf(double t);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Goodness of fit of observed counts against cell probabilities. The caller
// chooses the binning (including any pooled tail); probs must sum to ~1.
ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed,
                               const std::vector<double>& probs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// One-sample Kolmogorov-Smirnov against a continuous CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;  // 95%, normal approximation
    double stddev = 0.0;
    std::size_t n = 0;
    double lo() const { return mean - half_width; }
    double hi() const { return mean + half_width; }
};

MeanCi mean_ci95(const std::vector<double>& xs);

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace exactq
