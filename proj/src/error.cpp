#include "valuecast/error.hpp"

namespace valuecast {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kBadOrdinal: return "BadOrdinal";
    case ErrorCode::kBadAbility: return "BadAbility";
    case ErrorCode::kBadCategory: return "BadCategory";
    case ErrorCode::kBadNumber: return "BadNumber";
    case ErrorCode::kInconsistentRow: return "InconsistentRow";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kUnknownCountry: return "UnknownCountry";
    case ErrorCode::kBadHeight: return "BadHeight";
    case ErrorCode::kBadWeight: return "BadWeight";
    case ErrorCode::kBadMoney: return "BadMoney";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kSingularDesign: return "SingularDesign";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kTooFewTrials: return "TooFewTrials";
    case ErrorCode::kObjectiveFailure: return "ObjectiveFailure";
    case ErrorCode::kMissingCover: return "MissingCover";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace valuecast
