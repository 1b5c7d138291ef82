// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/state_batch.hpp"

#include <algorithm>
#include <string>

#include "qscd/error.hpp"

namespace qscd {

namespace {
constexpr std::size_t kLanes = 4;
}

StateBatch::StateBatch(std::size_t n_modes, std::size_t n_samples)
    : n_modes_(n_modes),
      n_samples_(n_samples),
      stride_((n_samples + kLanes - 1) / kLanes * kLanes),
      re_(n_modes * stride_, 0.0),
      im_(n_modes * stride_, 0.0) {}

StateBatch StateBatch::from_states(std::span<const StateVector> states) {
  if (states.empty()) return {};
  const std::size_t dim = states.front().dim();
  StateBatch batch(dim, states.size());
  for (std::size_t m = 0; m < states.size(); ++m) {
    if (states[m].dim() != dim) {
      throw Error(ErrorCode::DimMismatch,
                  "sample " + std::to_string(m) + " has dim " +
                      std::to_string(states[m].dim()) + ", expected " +
                      std::to_string(dim));
    }
    for (std::size_t k = 0; k < dim; ++k) batch.set_amp(m, k, states[m][k]);
  }
  return batch;
}

StateVector StateBatch::sample(std::size_t m) const {
  StateVector s(n_modes_);
  for (std::size_t k = 0; k < n_modes_; ++k) s[k] = amp(m, k);
  return s;
}

std::vector<StateVector> StateBatch::to_states() const {
  std::vector<StateVector> out;
  out.reserve(n_samples_);
  for (std::size_t m = 0; m < n_samples_; ++m) out.push_back(sample(m));
  return out;
}

void StateBatch::zero_rows_from(std::size_t d) {
  if (d >= n_modes_) return;
  std::fill(re_.begin() + static_cast<std::ptrdiff_t>(d * stride_), re_.end(),
            0.0);
  std::fill(im_.begin() + static_cast<std::ptrdiff_t>(d * stride_), im_.end(),
            0.0);
}

void StateBatch::row_norm_sq(std::size_t begin, std::size_t end,
                             std::span<double> out,
                             const kernels::KernelTable& kt) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = begin; k < end; ++k) {
    kt.accumulate_norm_sq(re_row(k), im_row(k), out.data(), stride_);
  }
}

void StateBatch::scale_rows(std::size_t begin, std::size_t end,
                            std::span<const double> factor,
                            const kernels::KernelTable& kt) {
  for (std::size_t k = begin; k < end; ++k) {
    kt.scale(re_row(k), im_row(k), factor.data(), stride_);
  }
}

void StateBatch::diff_norm_sq(const StateBatch& target, std::span<double> out,
                              const kernels::KernelTable& kt) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < n_modes_; ++k) {
    kt.accumulate_diff_sq(re_row(k), im_row(k), target.re_row(k),
                          target.im_row(k), out.data(), stride_);
  }
}

}  // namespace qscd
