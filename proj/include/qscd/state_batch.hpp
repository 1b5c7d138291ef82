// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qscd/kernels.hpp"
#include "qscd/state_vector.hpp"

namespace qscd {

/// M states over N modes in structure-of-arrays layout. Row k holds mode k of
/// every sample; rows are padded to a multiple of four lanes and the padding
/// lanes stay zero.
class StateBatch {
 public:
  StateBatch() = default;
  StateBatch(std::size_t n_modes, std::size_t n_samples);

  static StateBatch from_states(std::span<const StateVector> states);

  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t stride() const noexcept { return stride_; }

  double* re_row(std::size_t k) noexcept { return re_.data() + k * stride_; }
  double* im_row(std::size_t k) noexcept { return im_.data() + k * stride_; }
  const double* re_row(std::size_t k) const noexcept {
    return re_.data() + k * stride_;
  }
  const double* im_row(std::size_t k) const noexcept {
    return im_.data() + k * stride_;
  }

  Complex amp(std::size_t sample, std::size_t k) const {
    return {re_[k * stride_ + sample], im_[k * stride_ + sample]};
  }
  void set_amp(std::size_t sample, std::size_t k, Complex a) {
    re_[k * stride_ + sample] = a.real();
    im_[k * stride_ + sample] = a.imag();
  }

  StateVector sample(std::size_t m) const;
  std::vector<StateVector> to_states() const;

  /// Applies a 2x2 block to modes (k, k+1) of every sample.
  void apply_block(const kernels::Block2& u, std::size_t k,
                   const kernels::KernelTable& kt) {
    kt.apply_block(u, re_row(k), im_row(k), re_row(k + 1), im_row(k + 1),
                   stride_);
  }

  /// Zeroes rows d..N-1.
  void zero_rows_from(std::size_t d);

  /// Per-sample sum of |amp|^2 over rows [begin, end). out has stride lanes.
  void row_norm_sq(std::size_t begin, std::size_t end, std::span<double> out,
                   const kernels::KernelTable& kt) const;

  /// Multiplies every row by a per-lane factor.
  void scale_rows(std::size_t begin, std::size_t end,
                  std::span<const double> factor,
                  const kernels::KernelTable& kt);

  /// Per-sample sum over modes of |amp - target|^2.
  void diff_norm_sq(const StateBatch& target, std::span<double> out,
                    const kernels::KernelTable& kt) const;

  friend bool operator==(const StateBatch&, const StateBatch&) = default;

 private:
  std::size_t n_modes_ = 0;
  std::size_t n_samples_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> re_;
  std::vector<double> im_;
};

}  // namespace qscd
