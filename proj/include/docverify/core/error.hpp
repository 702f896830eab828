#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docverify {

enum class ErrorCode {
  IoError,
  ParseError,
  ProviderError,
  GenerationEmpty,
  MalformedCompletion,
  SignatureMismatch,
  ToolchainError,
  SandboxError,
  SchemaError,
  DanglingPair,
  MissingPrediction,
  MissingPair,
  InsufficientConsistentPool,
  ConfigError,
  SubjectBroken,
  MissingReport,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace docverify
