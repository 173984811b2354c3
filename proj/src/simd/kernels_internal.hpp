#pragma once

#include "likefarm/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define LIKEFARM_HAVE_AVX2 1
#else
#define LIKEFARM_HAVE_AVX2 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define LIKEFARM_HAVE_NEON 1
#else
#define LIKEFARM_HAVE_NEON 0
#endif

namespace likefarm::simd::detail {

#if LIKEFARM_HAVE_AVX2
const KernelTable& avx2_table();
#endif

#if LIKEFARM_HAVE_NEON
const KernelTable& neon_table();
#endif

}  // namespace likefarm::simd::detail
