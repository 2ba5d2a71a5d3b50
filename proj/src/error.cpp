#include "effpred/error.hpp"

namespace effpred {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnsupportedFormat: return "unsupported_format";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kDegenerateInput: return "degenerate_input";
    case ErrorCode::kConsistency: return "consistency";
    case ErrorCode::kSingularFit: return "singular_fit";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kDegenerateTask: return "degenerate_task";
  }
  return "unknown";
}

}  // namespace effpred
