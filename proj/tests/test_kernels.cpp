#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "slelab/core.hpp"
#include "slelab/kernels.hpp"
#include "slelab/rng.hpp"

using namespace slelab;

namespace {

struct Batch {
    std::vector<double> re, im, prev;
    std::vector<std::int32_t> sw;
};

Batch random_batch(int n, Rng& rng) {
    Batch b;
    b.re.resize(n);
    b.im.resize(n);
    b.prev.resize(n);
    b.sw.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        b.re[i] = 4.0 * rng.normal();
        // mix of interior, near-axis and boundary points
        const double u = rng.uniform();
        b.im[i] = u < 0.2 ? 0.0 : (u < 0.4 ? 1e-8 * rng.uniform() : 2.0 * rng.uniform());
        b.prev[i] = rng.uniform() < 0.5 ? -b.re[i] : b.re[i];
        if (rng.uniform() < 0.1) b.sw[i] = 3;  // some already swallowed
    }
    return b;
}

bool bitwise_equal(const Batch& a, const Batch& b) {
    return std::memcmp(a.re.data(), b.re.data(), a.re.size() * 8) == 0 &&
           std::memcmp(a.im.data(), b.im.data(), a.im.size() * 8) == 0 &&
           std::memcmp(a.prev.data(), b.prev.data(), a.prev.size() * 8) == 0 &&
           std::memcmp(a.sw.data(), b.sw.data(), a.sw.size() * 4) == 0;
}

}  // namespace

TEST_CASE("scalar batch step reproduces the closed-form slit map") {
    // one interior point, zero driving: g = sqrt(z^2 + 4t)
    std::vector<double> re{1.0}, im{1.0}, prev{0.0};
    std::vector<std::int32_t> sw{-1};
    kern::chordal_step_batch_scalar(re.data(), im.data(), prev.data(), sw.data(), 1,
                                    0.0, 1.0, kern::kEpsSwallow, 1, true);
    const Complex expect = sqrt_upper(Complex(1.0, 1.0) * Complex(1.0, 1.0) + 4.0);
    CHECK(re[0] == doctest::Approx(expect.real()).epsilon(1e-15));
    CHECK(im[0] == doctest::Approx(expect.imag()).epsilon(1e-15));
    CHECK(sw[0] == -1);
}

TEST_CASE("close rule swallows a point sitting on the driving") {
    std::vector<double> re{0.005}, im{0.005}, prev{0.0};
    std::vector<std::int32_t> sw{-1};
    kern::chordal_step_batch_scalar(re.data(), im.data(), prev.data(), sw.data(), 1,
                                    0.0, 1e-4, kern::kEpsSwallow, 7, true);
    CHECK(sw[0] == 7);  // |delta| <= 2 sqrt(dt) = 0.02
}

TEST_CASE("flip rule swallows a jumped-past boundary point") {
    // real point right of w at the previous step, left of w now
    std::vector<double> re{1.0}, im{0.0}, prev{0.5};
    std::vector<std::int32_t> sw{-1};
    kern::chordal_step_batch_scalar(re.data(), im.data(), prev.data(), sw.data(), 1,
                                    2.0, 1e-4, kern::kEpsSwallow, 11, true);
    CHECK(sw[0] == 11);
}

TEST_CASE("detection disabled leaves everything alive") {
    std::vector<double> re{0.0}, im{0.0}, prev{0.5};
    std::vector<std::int32_t> sw{-1};
    kern::chordal_step_batch_scalar(re.data(), im.data(), prev.data(), sw.data(), 1,
                                    2.0, 1e-4, kern::kEpsSwallow, 11, false);
    CHECK(sw[0] == -1);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 batch kernel is bit-identical to scalar") {
    if (!kern::avx2_available()) return;
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(37));
        Batch a = random_batch(n, rng);
        Batch b = a;
        const double w = rng.normal();
        const double dt = std::pow(10.0, -1.0 - 3.0 * rng.uniform());
        for (int k = 1; k <= 16; ++k) {
            kern::chordal_step_batch_scalar(a.re.data(), a.im.data(), a.prev.data(),
                                            a.sw.data(), n, w, dt, kern::kEpsSwallow,
                                            k, true);
            kern::chordal_step_batch_avx2(b.re.data(), b.im.data(), b.prev.data(),
                                          b.sw.data(), n, w, dt, kern::kEpsSwallow,
                                          k, true);
        }
        REQUIRE(bitwise_equal(a, b));
    }
}

TEST_CASE("avx2 lanes kernel is bit-identical to scalar") {
    if (!kern::avx2_available()) return;
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(37));
        Batch a = random_batch(n, rng);
        Batch b = a;
        std::vector<double> w(n);
        for (auto& x : w) x = rng.normal();
        const double dt = 1e-3;
        for (int k = 1; k <= 16; ++k) {
            kern::chordal_step_lanes_scalar(a.re.data(), a.im.data(), a.prev.data(),
                                            a.sw.data(), n, w.data(), dt,
                                            kern::kEpsSwallow, k, true);
            kern::chordal_step_lanes_avx2(b.re.data(), b.im.data(), b.prev.data(),
                                          b.sw.data(), n, w.data(), dt,
                                          kern::kEpsSwallow, k, true);
        }
        REQUIRE(bitwise_equal(a, b));
    }
}
#endif

TEST_CASE("dispatch returns a working kernel") {
    INFO("selected: ", kern::selected_kernel_name());
    auto fn = kern::chordal_step_batch();
    std::vector<double> re{2.0}, im{0.0}, prev{0.0};
    std::vector<std::int32_t> sw{-1};
    fn(re.data(), im.data(), prev.data(), sw.data(), 1, 0.0, 1.0, kern::kEpsSwallow,
       1, true);
    CHECK(re[0] == doctest::Approx(std::sqrt(8.0)));
}
