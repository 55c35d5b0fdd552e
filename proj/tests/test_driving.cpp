#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "slelab/driving.hpp"
#include "slelab/stats.hpp"

using namespace slelab;

TEST_CASE("brownian driving shape and start") {
    const DrivingPath p = brownian_driving(6.0, 1.0, 1e-4, 42);
    CHECK(p.values.size() == 10001);
    CHECK(p.values[0] == 0.0);
}

TEST_CASE("brownian increments have variance kappa dt within 1%") {
    const double kappa = 6.0, dt = 1e-3;
    const DrivingPath p = brownian_driving(kappa, 1000.0, dt, 7);
    double sq = 0.0;
    const std::int64_t n = p.steps();
    for (std::int64_t k = 1; k <= n; ++k) {
        const double inc = p.values[k] - p.values[k - 1];
        sq += inc * inc;
    }
    CHECK(sq / n == doctest::Approx(kappa * dt).epsilon(0.01));
}

TEST_CASE("same seed twice gives identical arrays") {
    const DrivingPath a = brownian_driving(4.0, 0.5, 1e-3, 99);
    const DrivingPath b = brownian_driving(4.0, 0.5, 1e-3, 99);
    CHECK(a.values == b.values);
}

TEST_CASE("kappa_rho dimension formula and invariants") {
    CHECK(besq_dimension(6.0, 1.0) == doctest::Approx(2.0));
    const DrivingPath p = kappa_rho_driving(6.0, 1.0, 1.0, 1e-3, 5, 0.0);
    REQUIRE(p.rho.has_value());
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        CHECK(p.z_values[k] >= 0.0);                      // Z >= 0 pathwise
        CHECK(p.values[k] <= p.o_values[k]);              // W <= O pathwise
        CHECK(p.o_values[k] - p.values[k] == p.z_values[k]);  // exact identity
    }
}

TEST_CASE("kappa_rho rejects rho <= -2") {
    CHECK_THROWS_AS(kappa_rho_driving(6.0, -2.0, 1.0, 1e-3, 1, 0.0), DomainError);
}

TEST_CASE("squared gap mean matches the BESQ moment d*T") {
    // E Z_T^2 / kappa = d T from a zero start.
    const double kappa = 6.0, rho = 1.0, T = 0.5, dt = 1e-3;
    const double d = besq_dimension(kappa, rho);
    const int n = 4000;
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
        Rng rng = Rng::stream(11, static_cast<std::uint64_t>(r));
        const DrivingPath p = kappa_rho_driving(kappa, rho, T, dt, rng, 0.0);
        const double zt = p.z_values.back();
        acc += zt * zt / kappa;
    }
    const double mean = acc / n;
    // var of Z^2/kappa is O((dT)^2); 1% of the target is ~4 sigma here
    CHECK(mean == doctest::Approx(d * T).epsilon(0.05));
}

TEST_CASE("rho = 0 increments match plain brownian driving in law") {
    const double kappa = 6.0, dt = 1e-3, T = 4.0;
    std::vector<double> inc_a, inc_b;
    for (int r = 0; r < 12; ++r) {
        Rng ra = Rng::stream(21, static_cast<std::uint64_t>(r));
        const DrivingPath a = kappa_rho_driving(kappa, 0.0, T, dt, ra, 0.0);
        Rng rb = Rng::stream(22, static_cast<std::uint64_t>(r));
        const DrivingPath b = brownian_driving(kappa, T, dt, rb);
        for (std::int64_t k = 1; k <= a.steps(); ++k)
            inc_a.push_back(a.values[k] - a.values[k - 1]);
        for (std::int64_t k = 1; k <= b.steps(); ++k)
            inc_b.push_back(b.values[k] - b.values[k - 1]);
    }
    const GoFResult r = ks_two_sample(inc_a, inc_b);
    CHECK(r.p_value > 0.01);
}

TEST_CASE("radial driving lives on the circle") {
    const RadialDriving d = radial_driving(2.0, 0.1, 1e-4, 3);
    CHECK(d.xi[0] == Complex(1.0, 0.0));
    for (const Complex& x : d.xi) CHECK(std::abs(x) == doctest::Approx(1.0));
    // unwrapped phase increments have variance kappa dt
    const RadialDriving big = radial_driving(3.0, 100.0, 1e-3, 17);
    double sq = 0.0;
    for (std::int64_t k = 1; k <= big.steps(); ++k) {
        const Complex ratio = big.xi[k] / big.xi[k - 1];
        const double inc = std::atan2(ratio.imag(), ratio.real());
        sq += inc * inc;
    }
    CHECK(sq / big.steps() == doctest::Approx(3.0 * 1e-3).epsilon(0.01));
}

TEST_CASE("driving csv round trip") {
    const DrivingPath p = kappa_rho_driving(5.0, 0.5, 0.02, 1e-3, 123, 0.25);
    std::stringstream ss;
    dump_driving_csv(p, ss);
    const DrivingPath q = load_driving_csv(ss);
    CHECK(q.kappa == p.kappa);
    CHECK(q.dt == p.dt);
    REQUIRE(q.rho.has_value());
    CHECK(*q.rho == *p.rho);
    REQUIRE(q.values.size() == p.values.size());
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        CHECK(q.values[k] == p.values[k]);
        CHECK(q.o_values[k] == p.o_values[k]);
        CHECK(q.z_values[k] == p.z_values[k]);
    }
}
