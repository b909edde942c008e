#pragma once

// Hot dense kernels get an AVX2 clone picked at load time. No FMA, so both
// clones round identically.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define FOT_SIMD_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define FOT_SIMD_CLONES
#endif
