#pragma once

#include <cstdint>

namespace slelab::kern {

// Default tolerance for the flattened-point swallow rule.
inline constexpr double kEpsSwallow = 1e-6;

// One discrete half-plane Loewner step over a batch of tracked points:
//
//     g  <-  w + sqrt((g - w)^2 + 4 dt)
//
// with the square root branch chosen in the closed upper half-plane and the
// sign of the real part following the side of the point relative to w.
// Points are SoA: re[i], im[i] (im >= 0; boundary points carry im == +0.0).
// prev_dx[i] holds (re - w) from the previous step (0 = no history yet).
// swallow_step[i] < 0 means alive; swallowed points are left untouched.
//
// With detect == true a point is declared swallowed at `step_index` when
//   (close)  (re-w)^2 + im^2 <= 4 dt, or
//   (flip)   im <= eps_sw and prev_dx * (re-w) < 0   (driving jumped past it).
// detect == false turns detection off entirely (kappa <= 4 tracking).
//
// `w` is shared by the whole batch. The `lanes` variants take one driving
// value per point instead, for advancing independent replicas in lockstep.
//
// The scalar and AVX2 variants are bit-for-bit identical: same operation
// sequence, correctly rounded +,-,*,/,sqrt only, and the build disables FMA
// contraction.

void chordal_step_batch_scalar(double* re, double* im, double* prev_dx,
                               std::int32_t* swallow_step, int n, double w,
                               double dt, double eps_sw, std::int32_t step_index,
                               bool detect);

void chordal_step_lanes_scalar(double* re, double* im, double* prev_dx,
                               std::int32_t* swallow_step, int n, const double* w,
                               double dt, double eps_sw, std::int32_t step_index,
                               bool detect);

#if defined(__x86_64__) || defined(_M_X64)
void chordal_step_batch_avx2(double* re, double* im, double* prev_dx,
                             std::int32_t* swallow_step, int n, double w,
                             double dt, double eps_sw, std::int32_t step_index,
                             bool detect);

void chordal_step_lanes_avx2(double* re, double* im, double* prev_dx,
                             std::int32_t* swallow_step, int n, const double* w,
                             double dt, double eps_sw, std::int32_t step_index,
                             bool detect);
#endif

bool avx2_available();

using ChordalBatchFn = void (*)(double*, double*, double*, std::int32_t*, int,
                                double, double, double, std::int32_t, bool);
using ChordalLanesFn = void (*)(double*, double*, double*, std::int32_t*, int,
                                const double*, double, double, std::int32_t, bool);

// Runtime-selected implementations (AVX2 when the CPU has it).
ChordalBatchFn chordal_step_batch();
ChordalLanesFn chordal_step_lanes();

const char* selected_kernel_name();

}  // namespace slelab::kern
