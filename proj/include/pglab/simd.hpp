#pragma once

// Flat-array kernels behind every hot loop in the library.
//
// Each kernel has a scalar reference implementation and, where the build and
// the CPU allow it, an AVX2 (x86-64) or NEON (aarch64) variant. The active
// table is chosen once at startup; PG_LAB_SIMD=scalar|avx2|neon overrides it.
//
// Elementwise kernels never use fused multiply-add, so every backend produces
// bit-identical results for them. Reductions (dot, sqdist) differ between
// backends only by summation order.

#include <cstddef>
#include <optional>
#include <string_view>

namespace pglab::simd {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
    Backend backend;

    // sum a[i]*b[i]; the f32 variant widens to double before multiplying.
    double (*dot_f64)(const double* a, const double* b, std::size_t n);
    double (*dot_f32)(const float* a, const float* b, std::size_t n);
    // sum (a[i]-b[i])^2
    double (*sqdist_f64)(const double* a, const double* b, std::size_t n);

    // out = a - b
    void (*sub_f64)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub_f32)(const float* a, const float* b, float* out, std::size_t n);

    // out = a + s*b (f32: evaluated in double, rounded once on store)
    void (*axpy_f64)(const double* a, double s, const double* b, double* out, std::size_t n);
    void (*axpy_f32)(const float* a, double s, const float* b, float* out, std::size_t n);

    // out = alpha*x + beta*y
    void (*lincomb_f64)(double alpha, const double* x, double beta, const double* y,
                        double* out, std::size_t n);

    // out = s*x
    void (*scale_f64)(const double* x, double s, double* out, std::size_t n);
    void (*scale_f32)(const float* x, double s, float* out, std::size_t n);

    // parallel = coeff*ref; orthogonal = delta - coeff*ref (f32: in double)
    void (*project_f64)(const double* delta, const double* ref, double coeff,
                        double* parallel, double* orthogonal, std::size_t n);
    void (*project_f32)(const float* delta, const float* ref, double coeff,
                        float* parallel, float* orthogonal, std::size_t n);
};

// The table in use. Thread-safe to call; selection happens on first use.
const KernelTable& kernels();

// nullptr when the backend was not compiled in or the CPU lacks support.
const KernelTable* kernels_for(Backend backend);

// Throws ContractError if the backend is unavailable.
void select_backend(Backend backend);

std::string_view to_string(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);

}  // namespace pglab::simd
