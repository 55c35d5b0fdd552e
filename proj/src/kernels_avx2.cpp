#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "slelab/kernels.hpp"

namespace slelab::kern {

namespace {

// Mirrors step_one() in kernels_scalar.cpp op for op.
template <bool kLanes>
inline void step4(double* re, double* im, double* prev_dx,
                  std::int32_t* swallow_step, const double* w_arr, double w_one,
                  double dt, double eps_sw, std::int32_t step_index, bool detect) {
    const __m256d vw = kLanes ? _mm256_loadu_pd(w_arr) : _mm256_set1_pd(w_one);
    const __m256d four_dt = _mm256_set1_pd(4.0 * dt);
    const __m256d eps = _mm256_set1_pd(eps_sw);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign_bit = _mm256_set1_pd(-0.0);

    const __m128i sw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(swallow_step));
    const __m128i alive32 = _mm_cmplt_epi32(sw, _mm_setzero_si128());
    const __m256d alive = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(alive32));

    const __m256d vre = _mm256_loadu_pd(re);
    const __m256d vim = _mm256_loadu_pd(im);
    const __m256d vprev = _mm256_loadu_pd(prev_dx);

    const __m256d dx = _mm256_sub_pd(vre, vw);
    const __m256d dy = vim;
    const __m256d t1 = _mm256_mul_pd(dx, dx);
    const __m256d t2 = _mm256_mul_pd(dy, dy);

    __m256d newly = zero;
    if (detect) {
        const __m256d close =
            _mm256_cmp_pd(_mm256_add_pd(t1, t2), four_dt, _CMP_LE_OQ);
        const __m256d flat = _mm256_cmp_pd(dy, eps, _CMP_LE_OQ);
        const __m256d flipped =
            _mm256_cmp_pd(_mm256_mul_pd(vprev, dx), zero, _CMP_LT_OQ);
        const __m256d flip = _mm256_and_pd(flat, flipped);
        newly = _mm256_and_pd(alive, _mm256_or_pd(close, flip));
    }

    const __m256d sx = _mm256_add_pd(_mm256_sub_pd(t1, t2), four_dt);
    const __m256d sy = _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_mul_pd(dx, dy));

    const __m256d m = _mm256_sqrt_pd(
        _mm256_add_pd(_mm256_mul_pd(sx, sx), _mm256_mul_pd(sy, sy)));
    const __m256d abs_sy = _mm256_andnot_pd(sign_bit, sy);
    const __m256d half_abs = _mm256_mul_pd(half, abs_sy);
    const __m256d a = _mm256_sqrt_pd(_mm256_mul_pd(half, _mm256_add_pd(m, sx)));
    const __m256d b = _mm256_sqrt_pd(_mm256_mul_pd(half, _mm256_sub_pd(m, sx)));
    const __m256d sx_nonneg = _mm256_cmp_pd(sx, zero, _CMP_GE_OQ);
    __m256d re_mag = _mm256_blendv_pd(_mm256_div_pd(half_abs, b), a, sx_nonneg);
    __m256d im_mag = _mm256_blendv_pd(b, _mm256_div_pd(half_abs, a), sx_nonneg);
    const __m256d m_zero = _mm256_cmp_pd(m, zero, _CMP_EQ_OQ);
    re_mag = _mm256_blendv_pd(re_mag, zero, m_zero);
    im_mag = _mm256_blendv_pd(im_mag, zero, m_zero);

    const __m256d dx_neg = _mm256_cmp_pd(dx, zero, _CMP_LT_OQ);
    const __m256d re_signed = _mm256_or_pd(re_mag, _mm256_and_pd(dx_neg, sign_bit));

    const __m256d update = _mm256_andnot_pd(newly, alive);
    const __m256d re_new = _mm256_add_pd(vw, re_signed);
    _mm256_storeu_pd(re, _mm256_blendv_pd(vre, re_new, update));
    _mm256_storeu_pd(im, _mm256_blendv_pd(vim, im_mag, update));
    _mm256_storeu_pd(prev_dx, _mm256_blendv_pd(vprev, dx, update));

    // Narrow the 4x64 swallow mask to 4x32 and record the step index.
    const __m256i newly_i = _mm256_castpd_si256(newly);
    const __m256i pick = _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0);
    const __m128i newly32 =
        _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(newly_i, pick));
    const __m128i sw_new =
        _mm_blendv_epi8(sw, _mm_set1_epi32(step_index), newly32);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(swallow_step), sw_new);
}

}  // namespace

void chordal_step_batch_avx2(double* re, double* im, double* prev_dx,
                             std::int32_t* swallow_step, int n, double w,
                             double dt, double eps_sw, std::int32_t step_index,
                             bool detect) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        step4<false>(re + i, im + i, prev_dx + i, swallow_step + i, nullptr, w,
                     dt, eps_sw, step_index, detect);
    if (i < n)
        chordal_step_batch_scalar(re + i, im + i, prev_dx + i, swallow_step + i,
                                  n - i, w, dt, eps_sw, step_index, detect);
}

void chordal_step_lanes_avx2(double* re, double* im, double* prev_dx,
                             std::int32_t* swallow_step, int n, const double* w,
                             double dt, double eps_sw, std::int32_t step_index,
                             bool detect) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        step4<true>(re + i, im + i, prev_dx + i, swallow_step + i, w + i, 0.0,
                    dt, eps_sw, step_index, detect);
    if (i < n)
        chordal_step_lanes_scalar(re + i, im + i, prev_dx + i, swallow_step + i,
                                  n - i, w + i, dt, eps_sw, step_index, detect);
}

}  // namespace slelab::kern

#endif
