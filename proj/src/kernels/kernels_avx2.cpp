// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 only; callers reach it through the dispatch table
// after a CPUID check.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace qscd::kernels {

namespace {

// (ur + i ui) * (xr + i xi), real and imaginary parts.
inline __m256d cmul_re(__m256d ur, __m256d ui, __m256d xr, __m256d xi) {
  return _mm256_sub_pd(_mm256_mul_pd(ur, xr), _mm256_mul_pd(ui, xi));
}
inline __m256d cmul_im(__m256d ur, __m256d ui, __m256d xr, __m256d xi) {
  return _mm256_add_pd(_mm256_mul_pd(ur, xi), _mm256_mul_pd(ui, xr));
}

void apply_block(const Block2& u, double* a_re, double* a_im, double* b_re,
                 double* b_im, std::size_t count) {
  const __m256d u0r = _mm256_set1_pd(u.re[0]), u0i = _mm256_set1_pd(u.im[0]);
  const __m256d u1r = _mm256_set1_pd(u.re[1]), u1i = _mm256_set1_pd(u.im[1]);
  const __m256d u2r = _mm256_set1_pd(u.re[2]), u2i = _mm256_set1_pd(u.im[2]);
  const __m256d u3r = _mm256_set1_pd(u.re[3]), u3i = _mm256_set1_pd(u.im[3]);

  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d ar = _mm256_loadu_pd(a_re + j);
    const __m256d ai = _mm256_loadu_pd(a_im + j);
    const __m256d br = _mm256_loadu_pd(b_re + j);
    const __m256d bi = _mm256_loadu_pd(b_im + j);

    _mm256_storeu_pd(a_re + j, _mm256_add_pd(cmul_re(u0r, u0i, ar, ai),
                                             cmul_re(u1r, u1i, br, bi)));
    _mm256_storeu_pd(a_im + j, _mm256_add_pd(cmul_im(u0r, u0i, ar, ai),
                                             cmul_im(u1r, u1i, br, bi)));
    _mm256_storeu_pd(b_re + j, _mm256_add_pd(cmul_re(u2r, u2i, ar, ai),
                                             cmul_re(u3r, u3i, br, bi)));
    _mm256_storeu_pd(b_im + j, _mm256_add_pd(cmul_im(u2r, u2i, ar, ai),
                                             cmul_im(u3r, u3i, br, bi)));
  }
  for (; j < count; ++j) {
    apply_block_lane(u, a_re[j], a_im[j], b_re[j], b_im[j]);
  }
}

void accumulate_norm_sq(const double* re, const double* im, double* acc,
                        std::size_t count) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d r = _mm256_loadu_pd(re + j);
    const __m256d i = _mm256_loadu_pd(im + j);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(i, i));
    _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), sq));
  }
  for (; j < count; ++j) acc[j] = acc[j] + (re[j] * re[j] + im[j] * im[j]);
}

void scale(double* re, double* im, const double* factor, std::size_t count) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d f = _mm256_loadu_pd(factor + j);
    _mm256_storeu_pd(re + j, _mm256_mul_pd(_mm256_loadu_pd(re + j), f));
    _mm256_storeu_pd(im + j, _mm256_mul_pd(_mm256_loadu_pd(im + j), f));
  }
  for (; j < count; ++j) {
    re[j] = re[j] * factor[j];
    im[j] = im[j] * factor[j];
  }
}

void accumulate_diff_sq(const double* re, const double* im,
                        const double* t_re, const double* t_im, double* acc,
                        std::size_t count) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d dr =
        _mm256_sub_pd(_mm256_loadu_pd(re + j), _mm256_loadu_pd(t_re + j));
    const __m256d di =
        _mm256_sub_pd(_mm256_loadu_pd(im + j), _mm256_loadu_pd(t_im + j));
    const __m256d sq =
        _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
    _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), sq));
  }
  for (; j < count; ++j) {
    const double dr = re[j] - t_re[j];
    const double di = im[j] - t_im[j];
    acc[j] = acc[j] + (dr * dr + di * di);
  }
}

constexpr KernelTable kAvx2{
    Isa::Avx2, "avx2", apply_block, accumulate_norm_sq, scale,
    accumulate_diff_sq,
};

}  // namespace

const KernelTable* detail::avx2_table_impl() noexcept { return &kAvx2; }

}  // namespace qscd::kernels
