#include "slelab/special.hpp"

#include <cmath>
#include <stdexcept>

#include "slelab/core.hpp"

namespace slelab {

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be > 0");
    return std::lgamma(x);
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_fn(double a, double b) {
    return std::exp(log_beta(a, b));
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("reg_incomplete_beta: a,b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_incomplete_beta: x must be in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lbt = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double inverse_reg_incomplete_beta(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("inverse_reg_incomplete_beta: p in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0, x = 0.5;
    // Bisection to locate, then Newton to polish.
    for (int i = 0; i < 80; ++i) {
        x = 0.5 * (lo + hi);
        if (reg_incomplete_beta(a, b, x) < p)
            lo = x;
        else
            hi = x;
    }
    const double log_norm = -log_beta(a, b);
    for (int i = 0; i < 8; ++i) {
        const double f = reg_incomplete_beta(a, b, x) - p;
        const double dens = std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
        if (dens <= 0.0) break;
        double step = f / dens;
        double xn = x - step;
        if (xn <= 0.0 || xn >= 1.0) break;
        x = xn;
    }
    return x;
}

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("reg_lower_gamma: need a>0, x>=0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // Series.
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    return 1.0 - reg_upper_gamma(a, x);
}

double reg_upper_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("reg_upper_gamma: need a>0, x>=0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - reg_lower_gamma(a, x);
    // Lentz continued fraction.
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace slelab
