// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace qscd::kernels {

const KernelTable* avx2_table() noexcept {
#if defined(QSCD_HAVE_AVX2)
  return detail::avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports_avx2() noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& active_table() noexcept {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* env = std::getenv("QSCD_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) {
      return scalar_table();
    }
    if (const KernelTable* t = avx2_table(); t != nullptr && cpu_supports_avx2()) {
      return *t;
    }
    return scalar_table();
  }();
  return table;
}

}  // namespace qscd::kernels
