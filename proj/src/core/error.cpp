#include "docverify/core/error.hpp"

namespace docverify {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::GenerationEmpty: return "GenerationEmpty";
    case ErrorCode::MalformedCompletion: return "MalformedCompletion";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::ToolchainError: return "ToolchainError";
    case ErrorCode::SandboxError: return "SandboxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DanglingPair: return "DanglingPair";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::InsufficientConsistentPool: return "InsufficientConsistentPool";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::SubjectBroken: return "SubjectBroken";
    case ErrorCode::MissingReport: return "MissingReport";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace docverify
