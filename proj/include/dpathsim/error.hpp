#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpathsim {

enum class ErrorCode {
  kEmptyTrace,
  kInvalidSample,
  kInvalidQuery,
  kInvalidProbability,
  kInvalidArrival,
  kCacheFull,
  kAlreadyInstalled,
  kMissingFlow,
  kInvalidRate,
  kUnknownModel,
  kInvalidConfig,
  kParseError,
  kMalformedRow,
  kIncompleteModel,
  kDuplicateStage,
  kIo,
};

// Stable kebab-case identifier, e.g. "empty-trace".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dpathsim
