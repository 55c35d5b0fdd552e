#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slelab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// 99% two-sided normal quantile, used for every confidence interval.
inline constexpr double kZ99 = 2.5758293035489004;

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// Square root with the branch cut chosen so Im(result) >= 0.  This is the
// branch mapping C \ [0,inf) into the closed upper half-plane, which every
// half-plane Loewner step relies on.  The operation sequence is fixed (no
// hypot, no fused ops) so the SIMD kernels can reproduce it bit for bit.
inline Complex sqrt_upper(Complex s) {
    const double x = s.real();
    const double y = s.imag();
    const double m = std::sqrt(x * x + y * y);
    if (m == 0.0) return Complex(0.0, 0.0);
    double re_mag, im_mag;
    if (x >= 0.0) {
        re_mag = std::sqrt(0.5 * (m + x));
        im_mag = 0.5 * (y < 0.0 ? -y : y) / re_mag;
    } else {
        im_mag = std::sqrt(0.5 * (m - x));
        re_mag = 0.5 * (y < 0.0 ? -y : y) / im_mag;
    }
    const double re = (y < 0.0) ? -re_mag : re_mag;
    return Complex(re, im_mag);
}

}  // namespace slelab
