#pragma once

// Per-backend tables. Only the dispatcher includes this.

#include "pglab/simd.hpp"

namespace pglab::simd::detail {

extern const KernelTable scalar_table;

#if PGLAB_HAVE_AVX2
extern const KernelTable avx2_table;
#endif

#if PGLAB_HAVE_NEON
extern const KernelTable neon_table;
#endif

}  // namespace pglab::simd::detail
