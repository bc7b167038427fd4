#include "kernels_internal.hpp"

#include <arm_neon.h>

namespace pglab::simd::detail {
namespace {

double dot_f64(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_f32(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t va = vld1q_f32(a + i);
        const float32x4_t vb = vld1q_f32(b + i);
        acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
        acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

double sqdist_f64(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void sub_f64(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void sub_f32(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) vst1q_f32(out + i, vsubq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy_f64(const double* a, double s, const double* b, double* out, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vmulq_f64(vs, vld1q_f64(b + i))));
    for (; i < n; ++i) out[i] = a[i] + s * b[i];
}

void axpy_f32(const float* a, double s, const float* b, float* out, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t va = vcvt_f64_f32(vld1_f32(a + i));
        const float64x2_t vb = vcvt_f64_f32(vld1_f32(b + i));
        vst1_f32(out + i, vcvt_f32_f64(vaddq_f64(va, vmulq_f64(vs, vb))));
    }
    for (; i < n; ++i)
        out[i] = static_cast<float>(static_cast<double>(a[i]) + s * static_cast<double>(b[i]));
}

void lincomb_f64(double alpha, const double* x, double beta, const double* y, double* out,
                 std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    const float64x2_t vb = vdupq_n_f64(beta);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i,
                  vaddq_f64(vmulq_f64(va, vld1q_f64(x + i)), vmulq_f64(vb, vld1q_f64(y + i))));
    for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void scale_f64(const double* x, double s, double* out, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vs, vld1q_f64(x + i)));
    for (; i < n; ++i) out[i] = s * x[i];
}

void scale_f32(const float* x, double s, float* out, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1_f32(out + i, vcvt_f32_f64(vmulq_f64(vs, vcvt_f64_f32(vld1_f32(x + i)))));
    for (; i < n; ++i) out[i] = static_cast<float>(s * static_cast<double>(x[i]));
}

void project_f64(const double* delta, const double* ref, double coeff, double* parallel,
                 double* orthogonal, std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(coeff);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t p = vmulq_f64(vc, vld1q_f64(ref + i));
        vst1q_f64(parallel + i, p);
        vst1q_f64(orthogonal + i, vsubq_f64(vld1q_f64(delta + i), p));
    }
    for (; i < n; ++i) {
        const double p = coeff * ref[i];
        parallel[i] = p;
        orthogonal[i] = delta[i] - p;
    }
}

void project_f32(const float* delta, const float* ref, double coeff, float* parallel,
                 float* orthogonal, std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(coeff);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t p = vmulq_f64(vc, vcvt_f64_f32(vld1_f32(ref + i)));
        const float64x2_t d = vcvt_f64_f32(vld1_f32(delta + i));
        vst1_f32(parallel + i, vcvt_f32_f64(p));
        vst1_f32(orthogonal + i, vcvt_f32_f64(vsubq_f64(d, p)));
    }
    for (; i < n; ++i) {
        const double p = coeff * static_cast<double>(ref[i]);
        parallel[i] = static_cast<float>(p);
        orthogonal[i] = static_cast<float>(static_cast<double>(delta[i]) - p);
    }
}

}  // namespace

const KernelTable neon_table{
    Backend::neon, dot_f64,     dot_f32,   sqdist_f64, sub_f64,     sub_f32,     axpy_f64,
    axpy_f32,      lincomb_f64, scale_f64, scale_f32,  project_f64, project_f32,
};

}  // namespace pglab::simd::detail
