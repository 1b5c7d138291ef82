// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qscd {

enum class ErrorCode {
  ZeroVector,
  DimMismatch,
  NotNormalized,
  IndexOutOfRange,
  OddModesForCross,
  FullyRejected,
  ZeroImage,
  ShapeMismatch,
  InvalidParams,
  NonFiniteLoss,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error code. All library failures
/// are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qscd
