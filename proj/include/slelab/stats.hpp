#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace slelab {

/// Point estimate with a 99% normal-approximation confidence half-width.
struct EstimateWithCI {
    double estimate = 0.0;
    double half_width = 0.0;
    std::int64_t n = 0;

    bool covers(double target) const {
        return estimate - half_width <= target && target <= estimate + half_width;
    }
};

enum class GoFKind { KS, CHI2 };

struct GoFResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::int64_t n = 0;
    GoFKind kind = GoFKind::KS;
};

/// 99% CI for a proportion successes/n, with continuity correction.
EstimateWithCI proportion_ci(std::int64_t successes, std::int64_t n);

/// 99% CI for the mean of real samples.
EstimateWithCI mean_ci(const std::vector<double>& samples);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_q(double lambda);

/// One-sample KS test of samples against a target CDF.
GoFResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Pearson chi-squared test of observed counts against target proportions.
GoFResult chi2_test(const std::vector<std::int64_t>& counts, const std::vector<double>& probs);

/// Two-sample z test for equality of proportions; returns the p-value.
double two_proportion_p(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2);

/// Chi-squared homogeneity test between two count vectors over the same cells.
GoFResult chi2_homogeneity(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b);

/// Two-sample KS test; used for driving-law control checks.
GoFResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace slelab
