#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace multiseg {

enum class ErrorCode {
  // ingestion
  MissingTimestampColumn,
  NonMonotonicAfterSort,
  RaggedRow,
  UnparsableValue,
  IntervalOutOfBounds,
  // techniques
  DimensionKindMismatch,
  UnknownDimension,
  InsufficientData,
  InvalidParameter,
  // query language
  SyntaxError,
  UnknownTechnique,
  ParameterOutOfRange,
  ArityError,
  UnknownNode,
  // analytics
  EmptySequence,
  TooFewPoints,
  PeriodTooLong,
  // runtime
  Cancelled,
  Io,
  // service
  NotFound,
  NoTree,
  PayloadTooLarge,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code and, where it applies, a
/// location (row/column, JSON path, tree level...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string location = {})
      : std::runtime_error(message), code_(code), location_(std::move(location)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  std::string location_;
};

}  // namespace multiseg
