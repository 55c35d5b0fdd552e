#include "slelab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "slelab/core.hpp"
#include "slelab/special.hpp"

namespace slelab {

EstimateWithCI proportion_ci(std::int64_t successes, std::int64_t n) {
    if (n <= 0) throw DomainError("proportion_ci: n must be positive");
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
    const double hw = kZ99 * se + 0.5 / static_cast<double>(n);
    return {p, hw, n};
}

EstimateWithCI mean_ci(const std::vector<double>& samples) {
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    if (n <= 1) throw DomainError("mean_ci: need at least two samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, kZ99 * sd / std::sqrt(static_cast<double>(n)), n};
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

GoFResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    if (n == 0) throw DomainError("ks_test: empty sample");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::fabs(f - lo), std::fabs(hi - f)));
    }
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    return {d, kolmogorov_q(lambda), n, GoFKind::KS};
}

GoFResult chi2_test(const std::vector<std::int64_t>& counts, const std::vector<double>& probs) {
    if (counts.empty() || counts.size() != probs.size())
        throw DomainError("chi2_test: counts/probs size mismatch");
    std::int64_t n = 0;
    for (auto c : counts) n += c;
    if (n == 0) throw DomainError("chi2_test: empty counts");
    double stat = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probs[i] * static_cast<double>(n);
        if (expected <= 0.0) {
            if (counts[i] != 0) stat = 1e300;  // impossible cell observed
            continue;
        }
        const double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
        ++dof;
    }
    if (dof < 1) dof = 1;
    const double p = (stat >= 1e300) ? 0.0 : reg_upper_gamma(0.5 * dof, 0.5 * stat);
    return {stat, p, n, GoFKind::CHI2};
}

double two_proportion_p(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2) {
    if (n1 <= 0 || n2 <= 0) throw DomainError("two_proportion_p: empty sample");
    const double p1 = static_cast<double>(k1) / n1;
    const double p2 = static_cast<double>(k2) / n2;
    const double pool = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2));
    if (se == 0.0) return 1.0;
    const double z = std::fabs(p1 - p2) / se;
    return std::erfc(z / std::sqrt(2.0));
}

GoFResult chi2_homogeneity(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b) {
    if (a.size() != b.size() || a.empty())
        throw DomainError("chi2_homogeneity: size mismatch");
    const std::size_t k = a.size();
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na == 0.0 || nb == 0.0) throw DomainError("chi2_homogeneity: empty sample");
    double stat = 0.0;
    int dof = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double tot = static_cast<double>(a[i] + b[i]);
        if (tot == 0.0) continue;
        const double ea = tot * na / (na + nb);
        const double eb = tot * nb / (na + nb);
        const double da = a[i] - ea;
        const double db = b[i] - eb;
        stat += da * da / ea + db * db / eb;
        ++dof;
    }
    dof = std::max(dof - 1, 1);
    return {stat, reg_upper_gamma(0.5 * dof, 0.5 * stat),
            static_cast<std::int64_t>(na + nb), GoFKind::CHI2};
}

GoFResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t na = a.size(), nb = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < na && j < nb) {
        const double x = std::min(a[i], b[j]);
        while (i < na && a[i] <= x) ++i;
        while (j < nb && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = static_cast<double>(na) * nb / static_cast<double>(na + nb);
    const double sn = std::sqrt(ne);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    return {d, kolmogorov_q(lambda), static_cast<std::int64_t>(na + nb), GoFKind::KS};
}

}  // namespace slelab
