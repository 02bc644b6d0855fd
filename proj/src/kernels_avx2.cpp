#include "qhlab/kernels.hpp"

#ifdef QHLAB_HAVE_AVX2_TU

#include <immintrin.h>

#include <cmath>

namespace qhlab::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void minmax(const double* x, std::size_t n, double& lo_out, double& hi_out) {
    if (n < 4) {
        scalar::minmax(x, n, lo_out, hi_out);
        return;
    }
    __m256d vlo = _mm256_loadu_pd(x);
    __m256d vhi = vlo;
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        vlo = _mm256_min_pd(vlo, v);
        vhi = _mm256_max_pd(vhi, v);
    }
    alignas(32) double l[4], h[4];
    _mm256_store_pd(l, vlo);
    _mm256_store_pd(h, vhi);
    double lo = l[0], hi = h[0];
    for (int k = 1; k < 4; ++k) {
        if (l[k] < lo) lo = l[k];
        if (h[k] > hi) hi = h[k];
    }
    for (; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    lo_out = lo;
    hi_out = hi;
}

double max_abs_dev(const double* x, std::size_t n, double anchor) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d va = _mm256_set1_pd(anchor);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(x + i), va));
        m = _mm256_max_pd(m, d);
    }
    alignas(32) double t[4];
    _mm256_store_pd(t, m);
    double r = t[0];
    for (int k = 1; k < 4; ++k)
        if (t[k] > r) r = t[k];
    for (; i < n; ++i) {
        double d = std::fabs(x[i] - anchor);
        if (d > r) r = d;
    }
    return r;
}

}  // namespace qhlab::kernels::avx2

#endif
