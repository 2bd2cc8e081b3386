// AVX2+FMA kernels. This translation unit is compiled with -mavx2 -mfma;
// callers must gate on avx2_available().

#include "foamforge/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cassert>

namespace foamforge::simd {

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

// Converts the low/high float quads to double lanes so accumulation
// matches the scalar kernel's double precision.
inline __m256d low_pd(__m256 v) { return _mm256_cvtps_pd(_mm256_castps256_ps128(v)); }
inline __m256d high_pd(__m256 v) { return _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)); }

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot_avx2(std::span<const float> a, std::span<const float> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    const std::size_t n8 = n & ~std::size_t{7};

    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n8; i += 8) {
        __m256 va = _mm256_loadu_ps(a.data() + i);
        __m256 vb = _mm256_loadu_ps(b.data() + i);
        acc0 = _mm256_fmadd_pd(low_pd(va), low_pd(vb), acc0);
        acc1 = _mm256_fmadd_pd(high_pd(va), high_pd(vb), acc1);
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (std::size_t i = n8; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double squared_norm_avx2(std::span<const float> a) {
    const std::size_t n = a.size();
    const std::size_t n8 = n & ~std::size_t{7};

    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n8; i += 8) {
        __m256 va = _mm256_loadu_ps(a.data() + i);
        __m256d lo = low_pd(va);
        __m256d hi = high_pd(va);
        acc0 = _mm256_fmadd_pd(lo, lo, acc0);
        acc1 = _mm256_fmadd_pd(hi, hi, acc1);
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (std::size_t i = n8; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    }
    return acc;
}

}  // namespace foamforge::simd

#endif  // x86_64
