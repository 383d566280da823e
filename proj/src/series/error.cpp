#include "multiseg/error.hpp"

namespace multiseg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingTimestampColumn: return "MissingTimestampColumn";
    case ErrorCode::NonMonotonicAfterSort: return "NonMonotonicAfterSort";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::UnparsableValue: return "UnparsableValue";
    case ErrorCode::IntervalOutOfBounds: return "IntervalOutOfBounds";
    case ErrorCode::DimensionKindMismatch: return "DimensionKindMismatch";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownTechnique: return "UnknownTechnique";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::PeriodTooLong: return "PeriodTooLong";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NoTree: return "NoTree";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
  }
  return "Unknown";
}

}  // namespace multiseg
