// Compiled with -mavx2 -mfma. Keep this file free of standard-library
// templates so no AVX2-encoded inline function leaks into other objects.

#include "kernels_internal.hpp"

#include <immintrin.h>

namespace pglab::simd::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_f32(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        acc0 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                               _mm256_cvtps_pd(_mm256_castps256_ps128(vb)), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                               _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

double sqdist_f64(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void sub_f64(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void sub_f32(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy_f64(const double* a, double s, const double* b, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), prod));
    }
    for (; i < n; ++i) out[i] = a[i] + s * b[i];
}

void axpy_f32(const float* a, double s, const float* b, float* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
        const __m256d vb = _mm256_cvtps_pd(_mm_loadu_ps(b + i));
        _mm_storeu_ps(out + i, _mm256_cvtpd_ps(_mm256_add_pd(va, _mm256_mul_pd(vs, vb))));
    }
    for (; i < n; ++i)
        out[i] = static_cast<float>(static_cast<double>(a[i]) + s * static_cast<double>(b[i]));
}

void lincomb_f64(double alpha, const double* x, double beta, const double* y, double* out,
                 std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d px = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        const __m256d py = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(px, py));
    }
    for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void scale_f64(const double* x, double s, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = s * x[i];
}

void scale_f32(const float* x, double s, float* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        _mm_storeu_ps(out + i, _mm256_cvtpd_ps(_mm256_mul_pd(vs, vx)));
    }
    for (; i < n; ++i) out[i] = static_cast<float>(s * static_cast<double>(x[i]));
}

void project_f64(const double* delta, const double* ref, double coeff, double* parallel,
                 double* orthogonal, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(coeff);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_mul_pd(vc, _mm256_loadu_pd(ref + i));
        _mm256_storeu_pd(parallel + i, p);
        _mm256_storeu_pd(orthogonal + i, _mm256_sub_pd(_mm256_loadu_pd(delta + i), p));
    }
    for (; i < n; ++i) {
        const double p = coeff * ref[i];
        parallel[i] = p;
        orthogonal[i] = delta[i] - p;
    }
}

void project_f32(const float* delta, const float* ref, double coeff, float* parallel,
                 float* orthogonal, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(coeff);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_mul_pd(vc, _mm256_cvtps_pd(_mm_loadu_ps(ref + i)));
        const __m256d d = _mm256_cvtps_pd(_mm_loadu_ps(delta + i));
        _mm_storeu_ps(parallel + i, _mm256_cvtpd_ps(p));
        _mm_storeu_ps(orthogonal + i, _mm256_cvtpd_ps(_mm256_sub_pd(d, p)));
    }
    for (; i < n; ++i) {
        const double p = coeff * static_cast<double>(ref[i]);
        parallel[i] = static_cast<float>(p);
        orthogonal[i] = static_cast<float>(static_cast<double>(delta[i]) - p);
    }
}

}  // namespace

const KernelTable avx2_table{
    Backend::avx2, dot_f64,     dot_f32,   sqdist_f64, sub_f64,     sub_f32,     axpy_f64,
    axpy_f32,      lincomb_f64, scale_f64, scale_f32,  project_f64, project_f32,
};

}  // namespace pglab::simd::detail
