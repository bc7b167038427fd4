#include "kernels_internal.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "pglab/errors.hpp"

namespace pglab::simd {
namespace {

bool cpu_has_avx2() {
#if PGLAB_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* best_available() {
    if (const auto* t = kernels_for(Backend::avx2)) return t;
    if (const auto* t = kernels_for(Backend::neon)) return t;
    return &detail::scalar_table;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("PG_LAB_SIMD")) {
        if (auto backend = parse_backend(env)) {
            if (const auto* t = kernels_for(*backend)) return t;
        }
    }
    return best_available();
}

std::atomic<const KernelTable*>& active() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

const KernelTable* kernels_for(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return &detail::scalar_table;
        case Backend::avx2:
#if PGLAB_HAVE_AVX2
            if (cpu_has_avx2()) return &detail::avx2_table;
#endif
            return nullptr;
        case Backend::neon:
#if PGLAB_HAVE_NEON
            return &detail::neon_table;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

void select_backend(Backend backend) {
    const auto* t = kernels_for(backend);
    if (t == nullptr)
        throw ContractError("SIMD backend '" + std::string(to_string(backend)) +
                            "' is not available on this build/CPU");
    active().store(t, std::memory_order_release);
}

std::string_view to_string(Backend backend) {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "neon") return Backend::neon;
    return std::nullopt;
}

}  // namespace pglab::simd
