#include "synmarket/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SYNMARKET_HAVE_AVX2 1
#include <immintrin.h>
#else
#define SYNMARKET_HAVE_AVX2 0
#endif

namespace synmarket::kernels {

#if SYNMARKET_HAVE_AVX2
namespace {

#define SYNMARKET_AVX2 __attribute__((target("avx2")))

SYNMARKET_AVX2 inline __m256i tail_mask(std::size_t remaining) {
    const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), idx);
}

SYNMARKET_AVX2 double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    if (i < n) {
        const __m256i m = tail_mask(n - i);
        const __m256d d = _mm256_sub_pd(_mm256_maskload_pd(a + i, m), _mm256_maskload_pd(b + i, m));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    // (l0 + l2) + (l1 + l3)
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

SYNMARKET_AVX2 void squared_deviations_avx2(const double* a, const double* b, double* out,
                                            std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(d, d));
    }
    if (i < n) {
        const __m256i m = tail_mask(n - i);
        const __m256d d = _mm256_sub_pd(_mm256_maskload_pd(a + i, m), _mm256_maskload_pd(b + i, m));
        _mm256_maskstore_pd(out + i, m, _mm256_mul_pd(d, d));
    }
}

SYNMARKET_AVX2 void unit_affine_avx2(const double* v, const double* lo, const double* width,
                                     double* out, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(lo + i)),
                                        _mm256_loadu_pd(width + i));
        _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_max_pd(t, zero), one));
    }
    for (; i < n; ++i) {
        const double t = (v[i] - lo[i]) / width[i];
        const double c = t > 0.0 ? t : 0.0;
        out[i] = c < 1.0 ? c : 1.0;
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const bool supported = __builtin_cpu_supports("avx2");
    static const KernelTable table{Backend::Avx2, &squared_distance_avx2, &squared_deviations_avx2,
                                   &unit_affine_avx2};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace synmarket::kernels
