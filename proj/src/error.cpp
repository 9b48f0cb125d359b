#include "dpathsim/error.hpp"

namespace dpathsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTrace: return "empty-trace";
    case ErrorCode::kInvalidSample: return "invalid-sample";
    case ErrorCode::kInvalidQuery: return "invalid-query";
    case ErrorCode::kInvalidProbability: return "invalid-probability";
    case ErrorCode::kInvalidArrival: return "invalid-arrival";
    case ErrorCode::kCacheFull: return "cache-full";
    case ErrorCode::kAlreadyInstalled: return "already-installed";
    case ErrorCode::kMissingFlow: return "missing-flow";
    case ErrorCode::kInvalidRate: return "invalid-rate";
    case ErrorCode::kUnknownModel: return "unknown-model";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kMalformedRow: return "malformed-row";
    case ErrorCode::kIncompleteModel: return "incomplete-model";
    case ErrorCode::kDuplicateStage: return "duplicate-stage";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown-error";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace dpathsim
