#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace valuecast {

enum class ErrorCode {
  kMissingColumn,
  kBadOrdinal,
  kBadAbility,
  kBadCategory,
  kBadNumber,
  kInconsistentRow,
  kDuplicateKey,
  kUnknownCountry,
  kBadHeight,
  kBadWeight,
  kBadMoney,
  kEmptyDataset,
  kZeroVariance,
  kSingularDesign,
  kNotPositiveDefinite,
  kSchemaMismatch,
  kTooFewTrials,
  kObjectiveFailure,
  kMissingCover,
  kTooManyFeatures,
  kTooSmall,
  kLengthMismatch,
  kInvalidArgument,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode code);

// Every module reports failures through this type; the code identifies the
// condition, the message carries context such as a line number.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace valuecast
