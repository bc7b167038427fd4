#include "kernels_internal.hpp"

namespace pglab::simd::detail {
namespace {

double dot_f64(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_f32(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

double sqdist_f64(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void sub_f64(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void sub_f32(const float* a, const float* b, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy_f64(const double* a, double s, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + s * b[i];
}

void axpy_f32(const float* a, double s, const float* b, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<float>(static_cast<double>(a[i]) + s * static_cast<double>(b[i]));
}

void lincomb_f64(double alpha, const double* x, double beta, const double* y, double* out,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void scale_f64(const double* x, double s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i];
}

void scale_f32(const float* x, double s, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(s * static_cast<double>(x[i]));
}

void project_f64(const double* delta, const double* ref, double coeff, double* parallel,
                 double* orthogonal, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double p = coeff * ref[i];
        parallel[i] = p;
        orthogonal[i] = delta[i] - p;
    }
}

void project_f32(const float* delta, const float* ref, double coeff, float* parallel,
                 float* orthogonal, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double p = coeff * static_cast<double>(ref[i]);
        parallel[i] = static_cast<float>(p);
        orthogonal[i] = static_cast<float>(static_cast<double>(delta[i]) - p);
    }
}

}  // namespace

const KernelTable scalar_table{
    Backend::scalar, dot_f64,   dot_f32,   sqdist_f64,  sub_f64,     sub_f32,     axpy_f64,
    axpy_f32,        lincomb_f64, scale_f64, scale_f32, project_f64, project_f32,
};

}  // namespace pglab::simd::detail
