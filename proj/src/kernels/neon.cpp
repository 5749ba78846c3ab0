#include "synmarket/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#define SYNMARKET_HAVE_NEON 1
#include <arm_neon.h>
#else
#define SYNMARKET_HAVE_NEON 0
#endif

namespace synmarket::kernels {

#if SYNMARKET_HAVE_NEON
namespace {

// Two 2-wide accumulators stand in for one 4-wide lane set: acc01 holds
// lanes {0,1}, acc23 holds lanes {2,3}.
double squared_distance_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d01 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d23 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc01 = vaddq_f64(acc01, vmulq_f64(d01, d01));
        acc23 = vaddq_f64(acc23, vmulq_f64(d23, d23));
    }
    double lane[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1), vgetq_lane_f64(acc23, 0),
                      vgetq_lane_f64(acc23, 1)};
    for (std::size_t l = 0; i + l < n; ++l) {
        const double d = a[i + l] - b[i + l];
        lane[l] += d * d;
    }
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

void squared_deviations_neon(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        vst1q_f64(out + i, vmulq_f64(d, d));
    }
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        out[i] = d * d;
    }
}

void unit_affine_neon(const double* v, const double* lo, const double* width, double* out,
                      std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vdivq_f64(vsubq_f64(vld1q_f64(v + i), vld1q_f64(lo + i)), vld1q_f64(width + i));
        vst1q_f64(out + i, vminq_f64(vmaxq_f64(t, zero), one));
    }
    for (; i < n; ++i) {
        const double t = (v[i] - lo[i]) / width[i];
        const double c = t > 0.0 ? t : 0.0;
        out[i] = c < 1.0 ? c : 1.0;
    }
}

}  // namespace

const KernelTable* neon_kernels() {
    static const KernelTable table{Backend::Neon, &squared_distance_neon, &squared_deviations_neon,
                                   &unit_affine_neon};
    return &table;
}

#else

const KernelTable* neon_kernels() { return nullptr; }

#endif

}  // namespace synmarket::kernels
