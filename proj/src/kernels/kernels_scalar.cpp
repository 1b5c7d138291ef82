// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "kernels_internal.hpp"

namespace qscd::kernels {

namespace {

void apply_block(const Block2& u, double* a_re, double* a_im, double* b_re,
                 double* b_im, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    apply_block_lane(u, a_re[j], a_im[j], b_re[j], b_im[j]);
  }
}

void accumulate_norm_sq(const double* re, const double* im, double* acc,
                        std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    acc[j] = acc[j] + (re[j] * re[j] + im[j] * im[j]);
  }
}

void scale(double* re, double* im, const double* factor, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    re[j] = re[j] * factor[j];
    im[j] = im[j] * factor[j];
  }
}

void accumulate_diff_sq(const double* re, const double* im,
                        const double* t_re, const double* t_im, double* acc,
                        std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const double dr = re[j] - t_re[j];
    const double di = im[j] - t_im[j];
    acc[j] = acc[j] + (dr * dr + di * di);
  }
}

constexpr KernelTable kScalar{
    Isa::Scalar, "scalar", apply_block, accumulate_norm_sq, scale,
    accumulate_diff_sq,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace qscd::kernels
