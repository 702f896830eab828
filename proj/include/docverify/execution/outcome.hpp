#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace docverify {

enum class DiagnosticKind { CompileError, Warning };

struct SourceLocation {
  std::string file;
  int line = 0;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::CompileError;
  std::string message;
  std::optional<SourceLocation> location;

  std::string render() const;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

enum class TestStatus { Pass, Fail, Timeout, Crash };

std::string_view to_string(TestStatus s);
std::optional<TestStatus> test_status_from_string(std::string_view s);

// Timeout and Crash count as failures for transition purposes.
inline bool is_passing(TestStatus s) { return s == TestStatus::Pass; }

struct ExecutionOutcome {
  bool compiled = false;
  std::vector<Diagnostic> diagnostics;
  std::map<std::string, TestStatus> results;

  std::vector<std::string> failed() const;
  std::vector<std::string> passed() const;
  bool has_compile_error() const;

  friend bool operator==(const ExecutionOutcome&, const ExecutionOutcome&) = default;
};

}  // namespace docverify
