#pragma once

// Typed span wrappers over the active SIMD kernel table. Internal only.

#include <cmath>
#include <span>

#include "pglab/simd.hpp"

namespace pglab::vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
    return simd::kernels().dot_f64(a.data(), b.data(), a.size());
}
inline double dot(std::span<const float> a, std::span<const float> b) {
    return simd::kernels().dot_f32(a.data(), b.data(), a.size());
}

template <class T>
double norm(std::span<const T> x) {
    return std::sqrt(dot(x, x));
}

inline double sqdist(std::span<const double> a, std::span<const double> b) {
    return simd::kernels().sqdist_f64(a.data(), b.data(), a.size());
}

inline void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    simd::kernels().sub_f64(a.data(), b.data(), out.data(), a.size());
}
inline void sub(std::span<const float> a, std::span<const float> b, std::span<float> out) {
    simd::kernels().sub_f32(a.data(), b.data(), out.data(), a.size());
}

inline void axpy(std::span<const double> a, double s, std::span<const double> b,
                 std::span<double> out) {
    simd::kernels().axpy_f64(a.data(), s, b.data(), out.data(), a.size());
}
inline void axpy(std::span<const float> a, double s, std::span<const float> b,
                 std::span<float> out) {
    simd::kernels().axpy_f32(a.data(), s, b.data(), out.data(), a.size());
}

inline void lincomb(double alpha, std::span<const double> x, double beta,
                    std::span<const double> y, std::span<double> out) {
    simd::kernels().lincomb_f64(alpha, x.data(), beta, y.data(), out.data(), x.size());
}

inline void scale(std::span<const double> x, double s, std::span<double> out) {
    simd::kernels().scale_f64(x.data(), s, out.data(), x.size());
}
inline void scale(std::span<const float> x, double s, std::span<float> out) {
    simd::kernels().scale_f32(x.data(), s, out.data(), x.size());
}

inline void project(std::span<const double> delta, std::span<const double> ref, double coeff,
                    std::span<double> parallel, std::span<double> orthogonal) {
    simd::kernels().project_f64(delta.data(), ref.data(), coeff, parallel.data(),
                                orthogonal.data(), delta.size());
}
inline void project(std::span<const float> delta, std::span<const float> ref, double coeff,
                    std::span<float> parallel, std::span<float> orthogonal) {
    simd::kernels().project_f32(delta.data(), ref.data(), coeff, parallel.data(),
                                orthogonal.data(), delta.size());
}

template <class T>
bool all_finite(std::span<const T> x) {
    for (const T v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace pglab::vec
