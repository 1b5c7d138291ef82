// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/error.hpp"

namespace qscd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OddModesForCross: return "OddModesForCross";
    case ErrorCode::FullyRejected: return "FullyRejected";
    case ErrorCode::ZeroImage: return "ZeroImage";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace qscd
