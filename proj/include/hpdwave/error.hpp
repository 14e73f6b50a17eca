// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpdwave {

enum class ErrorKind {
  NonConvergence,
  DomainError,
  DimMismatch,
  NotPD,
  NotDyadic,
  DegenerateGrid,
  OrderTooLarge,
  UnsupportedOrder,
  BoundaryLocation,
  ShapeMismatch,
  RankDeficient,
  BandwidthTooSmall,
  UnsupportedMetric,
  InvalidSpec,
  LengthMismatch,
  EmptyInput,
  InvalidArgument,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hpdwave
