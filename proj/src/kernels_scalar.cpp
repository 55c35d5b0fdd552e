#include <cmath>

#include "slelab/kernels.hpp"

namespace slelab::kern {

namespace {

// Shared per-point step body.  The AVX2 kernels mirror this exact operation
// sequence; any change here must be replicated there.
inline void step_one(double& re, double& im, double& prev_dx,
                     std::int32_t& swallow_step, double w, double dt,
                     double eps_sw, std::int32_t step_index, bool detect) {
    if (swallow_step >= 0) return;
    const double dx = re - w;
    const double dy = im;
    const double t1 = dx * dx;
    const double t2 = dy * dy;
    if (detect) {
        const bool close = t1 + t2 <= 4.0 * dt;
        const bool flip = (dy <= eps_sw) && (prev_dx * dx < 0.0);
        if (close || flip) {
            swallow_step = step_index;
            return;
        }
    }
    const double sx = (t1 - t2) + 4.0 * dt;
    const double sy = 2.0 * (dx * dy);
    // sqrt with Im >= 0 (see core.hpp sqrt_upper), real-part sign = side of w.
    const double m = std::sqrt(sx * sx + sy * sy);
    double re_mag, im_mag;
    if (m == 0.0) {
        re_mag = 0.0;
        im_mag = 0.0;
    } else if (sx >= 0.0) {
        re_mag = std::sqrt(0.5 * (m + sx));
        im_mag = 0.5 * (sy < 0.0 ? -sy : sy) / re_mag;
    } else {
        im_mag = std::sqrt(0.5 * (m - sx));
        re_mag = 0.5 * (sy < 0.0 ? -sy : sy) / im_mag;
    }
    re = w + (dx < 0.0 ? -re_mag : re_mag);
    im = im_mag;
    prev_dx = dx;
}

}  // namespace

void chordal_step_batch_scalar(double* re, double* im, double* prev_dx,
                               std::int32_t* swallow_step, int n, double w,
                               double dt, double eps_sw, std::int32_t step_index,
                               bool detect) {
    for (int i = 0; i < n; ++i)
        step_one(re[i], im[i], prev_dx[i], swallow_step[i], w, dt, eps_sw,
                 step_index, detect);
}

void chordal_step_lanes_scalar(double* re, double* im, double* prev_dx,
                               std::int32_t* swallow_step, int n, const double* w,
                               double dt, double eps_sw, std::int32_t step_index,
                               bool detect) {
    for (int i = 0; i < n; ++i)
        step_one(re[i], im[i], prev_dx[i], swallow_step[i], w[i], dt, eps_sw,
                 step_index, detect);
}

}  // namespace slelab::kern
