// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

// Data-parallel inner loops over a batch of samples. Every kernel operates on
// structure-of-arrays rows: one row holds the real (or imaginary) parts of a
// single mode across all samples in the batch.
//
// The scalar table is the reference. SIMD tables evaluate the same
// expressions in the same association order without fused multiply-add, so
// their results are bitwise identical to the reference.

namespace qscd::kernels {

/// Dense complex 2x2 block, row-major: u00, u01, u10, u11.
struct Block2 {
  double re[4];
  double im[4];
};

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // (a, b) <- (u00*a + u01*b, u10*a + u11*b), elementwise over count lanes.
  void (*apply_block)(const Block2& u, double* a_re, double* a_im,
                      double* b_re, double* b_im, std::size_t count);

  // acc[j] += re[j]^2 + im[j]^2
  void (*accumulate_norm_sq)(const double* re, const double* im, double* acc,
                             std::size_t count);

  // re[j] *= factor[j]; im[j] *= factor[j]
  void (*scale)(double* re, double* im, const double* factor,
                std::size_t count);

  // acc[j] += (re[j] - t_re[j])^2 + (im[j] - t_im[j])^2
  void (*accumulate_diff_sq)(const double* re, const double* im,
                             const double* t_re, const double* t_im,
                             double* acc, std::size_t count);
};

/// One lane of apply_block. The single-state code paths and the remainder
/// lanes of SIMD variants use this, and the vector bodies follow the same
/// operation order.
inline void apply_block_lane(const Block2& u, double& a_re, double& a_im,
                             double& b_re, double& b_im) noexcept {
  const double ar = a_re, ai = a_im, br = b_re, bi = b_im;
  a_re = (u.re[0] * ar - u.im[0] * ai) + (u.re[1] * br - u.im[1] * bi);
  a_im = (u.re[0] * ai + u.im[0] * ar) + (u.re[1] * bi + u.im[1] * br);
  b_re = (u.re[2] * ar - u.im[2] * ai) + (u.re[3] * br - u.im[3] * bi);
  b_im = (u.re[2] * ai + u.im[2] * ar) + (u.re[3] * bi + u.im[3] * br);
}

const KernelTable& scalar_table() noexcept;

/// nullptr when the build has no AVX2 variant.
const KernelTable* avx2_table() noexcept;

bool cpu_supports_avx2() noexcept;

/// Table selected for this process: the widest variant the CPU supports,
/// unless QSCD_SIMD=scalar is set in the environment.
const KernelTable& active_table() noexcept;

}  // namespace qscd::kernels
