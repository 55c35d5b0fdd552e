#include <cstdlib>
#include <cstring>

#include "slelab/kernels.hpp"

namespace slelab::kern {

namespace {

bool force_scalar() {
    const char* env = std::getenv("SLELAB_KERNEL");
    return env != nullptr && std::strcmp(env, "scalar") == 0;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

ChordalBatchFn chordal_step_batch() {
#if defined(__x86_64__) || defined(_M_X64)
    static const ChordalBatchFn fn = (avx2_available() && !force_scalar())
                                         ? chordal_step_batch_avx2
                                         : chordal_step_batch_scalar;
#else
    static const ChordalBatchFn fn = chordal_step_batch_scalar;
#endif
    return fn;
}

ChordalLanesFn chordal_step_lanes() {
#if defined(__x86_64__) || defined(_M_X64)
    static const ChordalLanesFn fn = (avx2_available() && !force_scalar())
                                         ? chordal_step_lanes_avx2
                                         : chordal_step_lanes_scalar;
#else
    static const ChordalLanesFn fn = chordal_step_lanes_scalar;
#endif
    return fn;
}

const char* selected_kernel_name() {
    return chordal_step_batch() == chordal_step_batch_scalar ? "scalar" : "avx2";
}

}  // namespace slelab::kern
