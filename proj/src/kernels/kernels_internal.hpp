// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qscd/kernels.hpp"

namespace qscd::kernels::detail {

const KernelTable* avx2_table_impl() noexcept;

}  // namespace qscd::kernels::detail
