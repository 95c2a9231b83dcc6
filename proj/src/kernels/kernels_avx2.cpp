#include "bvx/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace bvx::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

double sum(const double* v, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        a0 = _mm256_add_pd(a0, _mm256_loadu_pd(v + i));
        a1 = _mm256_add_pd(a1, _mm256_loadu_pd(v + i + 4));
    }
    for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(v + i));
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += v[i];
    return s;
}

double sum_abs(const double* v, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        a0 = _mm256_add_pd(a0, vabs(_mm256_loadu_pd(v + i)));
        a1 = _mm256_add_pd(a1, vabs(_mm256_loadu_pd(v + i + 4)));
    }
    for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, vabs(_mm256_loadu_pd(v + i)));
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += std::abs(v[i]);
    return s;
}

double sum_squares(const double* v, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d x0 = _mm256_loadu_pd(v + i);
        const __m256d x1 = _mm256_loadu_pd(v + i + 4);
        a0 = _mm256_fmadd_pd(x0, x0, a0);
        a1 = _mm256_fmadd_pd(x1, x1, a1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(v + i);
        a0 = _mm256_fmadd_pd(x0, x0, a0);
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += v[i] * v[i];
    return s;
}

double max_abs(const double* v, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(vabs(_mm256_loadu_pd(v + i)), m);
    double r = hmax(m);
    for (; i < n; ++i) r = std::max(r, std::abs(v[i]));
    return r;
}

void max_into(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    // Operand order keeps dst on ties and signed zeros, matching std::max(dst, src).
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(src + i), _mm256_loadu_pd(dst + i)));
    for (; i < n; ++i) dst[i] = std::max(dst[i], src[i]);
}

double halfplane_poisson(double t, double x, const double* y, const double* w, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d vt2 = _mm256_set1_pd(t * t);
    const __m256d vx = _mm256_set1_pd(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(vx, _mm256_loadu_pd(y + i));
        const __m256d den = _mm256_fmadd_pd(d, d, vt2);
        const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(w + i), vt);
        acc = _mm256_add_pd(acc, _mm256_div_pd(num, den));
    }
    double s = hsum(acc);
    const double t2 = t * t;
    for (; i < n; ++i) {
        const double d = x - y[i];
        s += w[i] * t / (t2 + d * d);
    }
    return s;
}

double halfplane_dipole(double t, double x, const double* y, const double* w, std::size_t n) {
    const __m256d vt2 = _mm256_set1_pd(t * t);
    const __m256d vx = _mm256_set1_pd(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(vx, _mm256_loadu_pd(y + i));
        const __m256d den = _mm256_fmadd_pd(d, d, vt2);
        const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(w + i), d);
        acc = _mm256_add_pd(acc, _mm256_div_pd(num, den));
    }
    double s = hsum(acc);
    const double t2 = t * t;
    for (; i < n; ++i) {
        const double d = x - y[i];
        s += w[i] * d / (t2 + d * d);
    }
    return s;
}

double halfspace_poisson(double t, double x0, double x1, const double* y0, const double* y1,
                         const double* w, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d vt2 = _mm256_set1_pd(t * t);
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d vx1 = _mm256_set1_pd(x1);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(vx0, _mm256_loadu_pd(y0 + i));
        const __m256d d1 = _mm256_sub_pd(vx1, _mm256_loadu_pd(y1 + i));
        const __m256d r2 = _mm256_fmadd_pd(d1, d1, _mm256_fmadd_pd(d0, d0, vt2));
        const __m256d den = _mm256_mul_pd(r2, _mm256_sqrt_pd(r2));
        const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(w + i), vt);
        acc = _mm256_add_pd(acc, _mm256_div_pd(num, den));
    }
    double s = hsum(acc);
    const double t2 = t * t;
    for (; i < n; ++i) {
        const double d0 = x0 - y0[i];
        const double d1 = x1 - y1[i];
        const double r2 = t2 + d0 * d0 + d1 * d1;
        s += w[i] * t / (r2 * std::sqrt(r2));
    }
    return s;
}

constexpr Table kAvx2{sum,      sum_abs,           sum_squares,      max_abs,
                      max_into, halfplane_poisson, halfplane_dipole, halfspace_poisson};

}  // namespace

const Table& avx2_table() noexcept { return kAvx2; }
bool avx2_compiled() noexcept { return true; }

}  // namespace bvx::kernels

#else

namespace bvx::kernels {
const Table& avx2_table() noexcept { return scalar_table(); }
bool avx2_compiled() noexcept { return false; }
}  // namespace bvx::kernels

#endif
