#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace effpred {

/// Failure categories. Each maps to a distinct CLI exit status.
enum class ErrorCode : int {
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kValidation = 5,
  kFormat = 6,
  kUnsupportedFormat = 7,
  kCorruption = 8,
  kCapacity = 9,
  kDegenerateInput = 10,
  kConsistency = 11,
  kSingularFit = 12,
  kDomain = 13,
  kNumeric = 14,
  kDegenerateTask = 15,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {})
      : std::runtime_error(message), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::string context = {}) {
  throw Error(code, message, std::move(context));
}

}  // namespace effpred
