#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slelab/core.hpp"
#include "slelab/rng.hpp"
#include "slelab/special.hpp"
#include "slelab/stats.hpp"

using namespace slelab;

TEST_CASE("beta reflection identity B(1-x,x) = pi/sin(pi x)") {
    // 20 values across (0,1); relative accuracy 1e-12.
    for (int k = 1; k <= 20; ++k) {
        const double x = 0.05 + 0.9 * (k - 1) / 19.0;
        const double lhs = beta_fn(1.0 - x, x);
        const double rhs = kPi / std::sin(kPi * x);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::fabs(rhs));
    }
    CHECK(beta_fn(2.0 / 3.0, 1.0 / 3.0) ==
          doctest::Approx(2.0 * kPi / std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("regularized incomplete beta endpoints and symmetry") {
    CHECK(reg_incomplete_beta(0.7, 2.3, 0.0) == 0.0);
    CHECK(reg_incomplete_beta(0.7, 2.3, 1.0) == 1.0);
    CHECK(reg_incomplete_beta(1.7, 1.7, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
    // reflection I_x(a,b) = 1 - I_{1-x}(b,a)
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        for (double a : {0.25, 1.0, 3.5}) {
            for (double b : {0.4, 2.0}) {
                const double lhs = reg_incomplete_beta(a, b, x);
                const double rhs = 1.0 - reg_incomplete_beta(b, a, 1.0 - x);
                CHECK(std::fabs(lhs - rhs) <= 1e-12);
            }
        }
    }
}

TEST_CASE("incomplete beta monotone in x") {
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = reg_incomplete_beta(1.0 / 3.0, 1.0 / 3.0, i / 100.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("beta quantile inverts the CDF") {
    for (double p : {0.001, 0.1, 0.5, 0.9, 0.999}) {
        const double x = inverse_reg_incomplete_beta(0.25, 0.5, p);
        CHECK(reg_incomplete_beta(0.25, 0.5, x) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("regularized gamma sanity") {
    CHECK(reg_lower_gamma(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(reg_upper_gamma(0.5, 0.0) == 1.0);
    // chi-square df=2 tail: Q(1, x/2) = exp(-x/2)
    CHECK(reg_upper_gamma(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("ks statistic on a hand-computed pair") {
    const GoFResult r = ks_test({0.25, 0.75}, [](double x) { return x; });
    CHECK(r.statistic == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("chi2 exact counts give zero statistic and p = 1") {
    const GoFResult r = chi2_test({50, 25, 25}, {0.5, 0.25, 0.25});
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("ks self-test under the null") {
    Rng rng(424242);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = rng.uniform();
    const GoFResult r = ks_test(xs, [](double x) { return x; });
    CHECK(r.p_value > 0.001);
}

TEST_CASE("proportion CI covers and shrinks") {
    const EstimateWithCI e = proportion_ci(500, 1000);
    CHECK(e.estimate == doctest::Approx(0.5));
    CHECK(e.covers(0.5));
    const EstimateWithCI e2 = proportion_ci(5000, 10000);
    CHECK(e2.half_width < e.half_width);
}

TEST_CASE("rng moments and determinism") {
    Rng a(7), b(7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng rng(123);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(std::fabs(sq / n - 1.0) < 0.02);
}

TEST_CASE("gamma sampler mean/variance") {
    Rng rng(99);
    const double shape = 0.35;  // exercises the boost branch
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.gamma(shape);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(var == doctest::Approx(shape).epsilon(0.05));
}

TEST_CASE("noncentral chi squared mean") {
    Rng rng(1234);
    const double d = 1.5, lam = 7.0;
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += rng.noncentral_chi_squared(d, lam);
    CHECK(sum / n == doctest::Approx(d + lam).epsilon(0.01));
}

TEST_CASE("sqrt_upper branch") {
    const Complex r = sqrt_upper(Complex(-4.0, 0.0));
    CHECK(r.real() == 0.0);
    CHECK(r.imag() == doctest::Approx(2.0));
    const Complex s = sqrt_upper(Complex(0.0, -2.0));
    CHECK(s.imag() >= 0.0);
    const Complex sq = s * s;
    CHECK(sq.real() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sq.imag() == doctest::Approx(-2.0).epsilon(1e-14));
}
